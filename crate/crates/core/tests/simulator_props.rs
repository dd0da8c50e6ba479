use num_rational::BigRational;
use proptest::prelude::*;

use vfi_core::flow::backward_warp_field;
use vfi_core::frames::Frame;
use vfi_core::simulator::{
    blur_output_count, gen_scene_flow, gen_scene_frame, mean_frames, sample_uneven, write_blur_dataset,
    DatasetManifest, SceneSpec, Sprite, Texture,
};

fn scene(supersample: usize) -> SceneSpec {
    SceneSpec {
        width: 96,
        height: 80,
        background: Texture::new(5),
        sprites: vec![
            Sprite {
                texture: Texture::new(6),
                radius: 16.0,
                position: [30.0, 30.0],
                velocity: [14.0, 6.5],
                acceleration: [-6.0, 3.0],
            },
            Sprite {
                texture: Texture::new(7),
                radius: 12.0,
                position: [70.0, 55.0],
                velocity: [-9.0, -4.0],
                acceleration: [2.0, 0.0],
            },
        ],
        supersample,
        window: (0.0, 1.5),
    }
}

fn visible_inside(spec: &SceneSpec, i: usize, t: f64, p: [f64; 2], margin: f64) -> bool {
    let c = spec.sprites[i].center(t);
    let inside = (p[0] - c[0]).hypot(p[1] - c[1]) + margin <= spec.sprites[i].radius;
    inside
        && spec.sprites[i + 1..].iter().all(|o| {
            let oc = o.center(t);
            (p[0] - oc[0]).hypot(p[1] - oc[1]) > o.radius + margin
        })
}

/// Pixels at least `margin` inside sprite `i` and unoccluded at both `t`
/// and `t_to`.
fn interior(spec: &SceneSpec, i: usize, t: f64, t_to: f64, margin: f64) -> Vec<(usize, usize)> {
    let s = &spec.sprites[i];
    let (c, d) = (s.center(t), s.center(t_to));
    let mut out = Vec::new();
    for y in 0..spec.height {
        for x in 0..spec.width {
            let p = [x as f64, y as f64];
            let q = [p[0] + d[0] - c[0], p[1] + d[1] - c[1]];
            if visible_inside(spec, i, t, p, margin) && visible_inside(spec, i, t_to, q, margin) {
                out.push((x, y));
            }
        }
    }
    out
}

#[test]
fn brightness_constancy_on_sprite_interiors() {
    let spec = scene(4);
    for (t_from, t_to) in [(0.0, 0.7), (0.7, 1.0), (0.3, 1.5), (1.2, 0.2)] {
        let from = gen_scene_frame(&spec, t_from).unwrap();
        let to = gen_scene_frame(&spec, t_to).unwrap();
        let flow = gen_scene_flow(&spec, t_from, t_to).unwrap();
        let warped = backward_warp_field(&to, &flow).unwrap();
        for i in 0..spec.sprites.len() {
            let px = interior(&spec, i, t_from, t_to, 2.0);
            assert!(px.len() > 100);
            let err: f64 = px
                .iter()
                .map(|&(x, y)| {
                    let (a, b) = (warped.pixel(x, y), from.pixel(x, y));
                    (0..3).map(|k| (a[k] - b[k]).abs()).sum::<f64>() / 3.0
                })
                .sum::<f64>()
                / px.len() as f64;
            assert!(err <= 1e-3, "sprite {i}, {t_from}->{t_to}: mean abs {err}");
        }
    }
}

#[test]
fn brightness_constancy_on_random_scenes() {
    for seed in 0..6 {
        let mut spec = SceneSpec::random(seed, 96, 96, 2, (0.0, 1.0)).unwrap();
        spec.supersample = 4;
        let from = gen_scene_frame(&spec, 0.25).unwrap();
        let to = gen_scene_frame(&spec, 0.75).unwrap();
        let warped = backward_warp_field(&to, &gen_scene_flow(&spec, 0.25, 0.75).unwrap()).unwrap();
        for i in 0..spec.sprites.len() {
            let px = interior(&spec, i, 0.25, 0.75, 2.0);
            if px.len() < 50 {
                continue;
            }
            let err = px
                .iter()
                .map(|&(x, y)| {
                    let (a, b) = (warped.pixel(x, y), from.pixel(x, y));
                    (0..3).map(|k| (a[k] - b[k]).abs()).sum::<f64>() / 3.0
                })
                .sum::<f64>()
                / px.len() as f64;
            assert!(err <= 1e-3, "seed {seed} sprite {i}: mean abs {err}");
        }
    }
}

#[test]
fn flow_composes_along_the_trajectory() {
    let spec = scene(1);
    let a = gen_scene_flow(&spec, 0.2, 0.9).unwrap();
    let b = gen_scene_flow(&spec, 0.2, 1.4).unwrap();
    for (x, y) in interior(&spec, 0, 0.2, 0.2, 0.0) {
        let s = spec.sprites[0];
        let expect = [0, 1].map(|k| s.center(1.4)[k] - s.center(0.9)[k]);
        let got = [b.get(x, y)[0] - a.get(x, y)[0], b.get(x, y)[1] - a.get(x, y)[1]];
        assert!((got[0] - expect[0]).abs() < 1e-12 && (got[1] - expect[1]).abs() < 1e-12);
    }
}

#[test]
fn scene_generation_is_pure() {
    let spec = scene(2);
    assert_eq!(gen_scene_frame(&spec, 0.4).unwrap(), gen_scene_frame(&spec, 0.4).unwrap());
    let json = serde_json::to_string(&spec).unwrap();
    let back: SceneSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn out_of_window_times_are_rejected() {
    let spec = scene(1);
    assert!(gen_scene_frame(&spec, 1.6).is_err());
    assert!(gen_scene_flow(&spec, -0.1, 0.5).is_err());
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    a.next_up() - a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mean_is_order_free_and_within_one_ulp(vals in prop::collection::vec(0.0..1.0f64, 1..16), rot in 0usize..16) {
        let frames: Vec<Frame> = vals.iter().map(|&v| Frame::filled(1, 1, [v, 1.0 - v, v * v])).collect();
        let mean = mean_frames(&frames).unwrap();
        let mut shuffled = frames.clone();
        shuffled.rotate_left(rot % frames.len());
        shuffled.reverse();
        prop_assert_eq!(&mean_frames(&shuffled).unwrap(), &mean);
        for ch in 0..3 {
            let exact = frames
                .iter()
                .map(|f| BigRational::from_float(f.data()[ch]).unwrap())
                .fold(BigRational::from_integer(0.into()), |a, b| a + b)
                / BigRational::from_integer((frames.len() as i64).into());
            let got = mean.data()[ch];
            let diff = BigRational::from_float(got).unwrap() - exact;
            let bound = BigRational::from_float(ulp(got)).unwrap();
            prop_assert!(diff <= bound && diff >= -bound, "channel {}", ch);
        }
    }

    #[test]
    fn uneven_sampling_keeps_alternating_gaps(len in 4usize..80, a in 1usize..8, b in 1usize..8) {
        let idx: Vec<usize> = (0..len).collect();
        if let Ok(out) = sample_uneven(&idx, a, b) {
            for (k, w) in out.windows(2).enumerate() {
                prop_assert_eq!(w[1] - w[0], if k % 2 == 0 { a + 1 } else { b + 1 });
            }
        }
    }
}

#[test]
fn blur_count_sweep_matches_brute_force() {
    for len in 0..=100 {
        for m in 1..=10 {
            for n in 0..=10 {
                let brute = (0..len).step_by(m + n).filter(|s| s + m <= len).count();
                assert_eq!(blur_output_count(len, m, n), brute, "len {len} m {m} n {n}");
            }
        }
    }
}

#[test]
fn dataset_layout_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let frames = (0..23).map(|i| Ok(Frame::filled(5, 4, [i as f64 / 22.0; 3])));
    let manifest = write_blur_dataset(frames, 3, 2, 240.0, dir.path()).unwrap();
    assert_eq!(manifest.periods, 5);
    assert_eq!(manifest.discrete_lambda, Some(1.5));
    assert!((manifest.fps_out - 48.0).abs() < 1e-12);
    for k in 0..5 {
        assert!(dir.path().join(format!("blur/{k:06}.png")).exists());
        assert!(dir.path().join(format!("gt/{k:06}_s.png")).exists());
        assert!(dir.path().join(format!("gt/{k:06}_e.png")).exists());
        for j in 0..3 {
            assert!(dir.path().join(format!("gt/{k:06}_{j:02}.png")).exists());
        }
    }
    assert!(!dir.path().join("blur/000005.png").exists());
    let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let back: DatasetManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, manifest);
}

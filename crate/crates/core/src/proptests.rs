//! Randomized invariants across modules.

use proptest::prelude::*;

use crate::energies::{energy, EnergyConfig, EnergyKind};
use crate::flow::{mc_flow, FlowConfig, FlowScheme};
use crate::image::{merge_channels, split_channels, Image2D, PixelBuffer};
use crate::kernels::{kernel, KernelName};
use crate::linop::{LinearOperator, StencilOperator};
use crate::metrics::{ssim, SsimConfig};
use crate::operators::{
    gradient_magnitude, mean_curvature_fd, wmc_half_laplace, wmc_half_laplace_indexed, DiffConfig,
};
use crate::parallel::with_threads;
use crate::solvers::{dual_clamp, l2_area_step, shrink};
use crate::stats::HistogramStats;
use crate::stencil::{convolve3, Stencil3};
use crate::Identity;

fn image(max_side: usize, lo: f64, hi: f64) -> impl Strategy<Value = Image2D> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(w, h)| {
        prop::collection::vec(lo..hi, w * h)
            .prop_map(move |data| Image2D::from_vec(w, h, data).unwrap())
    })
}

fn image_pair(max_side: usize) -> impl Strategy<Value = (Image2D, Image2D)> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        let v = || prop::collection::vec(0.0..255.0, w * h);
        (v(), v()).prop_map(move |(a, b)| {
            (
                Image2D::from_vec(w, h, a).unwrap(),
                Image2D::from_vec(w, h, b).unwrap(),
            )
        })
    })
}

fn stencil() -> impl Strategy<Value = Stencil3> {
    prop::array::uniform3(prop::array::uniform3(-2.0..2.0)).prop_map(Stencil3::new)
}

fn rel_close(a: &Image2D, b: &Image2D, tol: f64) -> bool {
    let scale = a
        .data()
        .iter()
        .chain(b.data())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    a.max_abs_diff(b).unwrap() <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_linear((u, v) in image_pair(9), s in stencil(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let lhs = convolve3(&u.zip_map(&v, |x, y| a * x + b * y).unwrap(), &s);
        let rhs = convolve3(&u, &s)
            .zip_map(&convolve3(&v, &s), |x, y| a * x + b * y)
            .unwrap();
        prop_assert!(rel_close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn zero_sum_kernels_ignore_offsets(u in image(9, 0.0, 255.0), c in -100i32..100, k in 0usize..12) {
        let s = kernel(KernelName::ALL[k]);
        let shifted = convolve3(&u.map(|v| v + f64::from(c)), &s);
        prop_assert!(rel_close(&shifted, &convolve3(&u, &s), 1e-12));
        let flat = convolve3(&Image2D::filled(u.width(), u.height(), f64::from(c)), &s);
        prop_assert!(flat.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stencil_adjoint_is_consistent((u, v) in image_pair(7), s in stencil()) {
        let op = StencilOperator { stencil: s };
        let lhs = op.apply(&u).dot(&v).unwrap();
        let rhs = u.dot(&op.adjoint(&v)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()).max(1.0));
        prop_assert_eq!(Identity.apply(&u), u.clone());
    }

    #[test]
    fn rgb_split_merge_round_trip(w in 1usize..5, h in 1usize..5, seed in any::<u64>()) {
        let data: Vec<u8> = (0..w * h * 3).map(|i| (seed.wrapping_mul(i as u64 + 7) >> 13) as u8).collect();
        let buf = PixelBuffer::new(w, h, 3, data).unwrap();
        let chans = split_channels(&buf).unwrap();
        prop_assert_eq!(chans.len(), 3);
        prop_assert_eq!(merge_channels(&chans).unwrap(), buf);
    }

    #[test]
    fn half_laplace_selects_smallest_response(u in image(8, -255.0, 255.0)) {
        let out = wmc_half_laplace(&u);
        let responses: Vec<Image2D> = KernelName::HALF_LAPLACE.iter().map(|&k| convolve3(&u, &kernel(k))).collect();
        let bound = 2.0 * u.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..u.len() {
            let o = out.data()[i];
            prop_assert!(responses.iter().all(|d| o.abs() <= d.data()[i].abs()));
            prop_assert!(o.abs() <= bound);
        }
    }

    #[test]
    fn half_laplace_is_homogeneous(u in image(8, 0.0, 255.0), alpha in 0.1..20.0f64, c in -100.0..100.0f64) {
        let base = wmc_half_laplace(&u).map(|v| alpha * v);
        let moved = wmc_half_laplace(&u.map(|v| alpha * v + c));
        prop_assert!(moved.max_abs_diff(&base).unwrap() <= 1e-9 * alpha.max(1.0) * 255.0);
    }

    #[test]
    fn selection_is_contrast_invariant(u in image(8, 0.0, 255.0), e in -3i32..4) {
        let alpha = 2f64.powi(e);
        let (_, a) = wmc_half_laplace_indexed(&u);
        let (_, b) = wmc_half_laplace_indexed(&u.map(|v| alpha * v));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn half_laplace_flow_obeys_max_principle(u in image(10, 0.0, 255.0), dt in 0.05..=1.0f64, iters in 1usize..15) {
        let out = mc_flow(&u, &FlowConfig::new(FlowScheme::HalfLaplace, iters).with_dt(dt)).unwrap();
        prop_assert!(out.min() >= u.min() - 1e-9 && out.max() <= u.max() + 1e-9);
    }

    #[test]
    fn mean_curvature_is_contrast_invariant(u in image(8, 0.0, 255.0), alpha in 0.5..5.0f64) {
        let cfg = DiffConfig::default();
        let g = gradient_magnitude(&u);
        let a = mean_curvature_fd(&u, &cfg);
        let b = mean_curvature_fd(&u.map(|v| alpha * v), &cfg);
        for i in 0..u.len() {
            if g.data()[i] > 1e-3 {
                prop_assert!((a.data()[i] - b.data()[i]).abs() <= 1e-6 * a.data()[i].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn energies_are_nonnegative_and_homogeneous(u in image(8, 0.0, 255.0), alpha in 0.1..10.0f64) {
        for kind in [EnergyKind::Tv, EnergyKind::TvL1, EnergyKind::EpsTv, EnergyKind::Area, EnergyKind::Mc, EnergyKind::Wmc] {
            prop_assert!(energy(&u, &EnergyConfig::new(kind)).unwrap() >= 0.0);
        }
        let scaled = u.map(|v| alpha * v);
        for kind in [EnergyKind::Tv, EnergyKind::TvL1, EnergyKind::Wmc] {
            let cfg = EnergyConfig::new(kind);
            let (a, b) = (energy(&u, &cfg).unwrap(), energy(&scaled, &cfg).unwrap());
            prop_assert!((alpha * a - b).abs() <= 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn l2_area_step_is_homogeneous((u, f) in image_pair(8), alpha in 0.1..10.0f64, lambda in 0.0..5.0f64) {
        let a = l2_area_step(&u, &f, &Identity, lambda, 0.1).unwrap().map(|v| alpha * v);
        let b = l2_area_step(&u.map(|v| alpha * v), &f.map(|v| alpha * v), &Identity, lambda, 0.1).unwrap();
        prop_assert!(rel_close(&a, &b, 1e-12));
    }

    #[test]
    fn shrink_and_clamp_split_the_residual(r in -10.0..10.0f64, alpha in 0.01..5.0f64) {
        prop_assert!((shrink(r, alpha) - (r - dual_clamp(r, alpha))).abs() <= 1e-12);
        prop_assert!(dual_clamp(r, alpha).abs() <= alpha);
    }

    #[test]
    fn ssim_is_symmetric_and_bounded((a, b) in (12usize..20).prop_flat_map(|n| {
        let v = move || prop::collection::vec(0.0..255.0, n * n).prop_map(move |d| Image2D::from_vec(n, n, d).unwrap());
        (v(), v())
    })) {
        let cfg = SsimConfig::default();
        let (ab, ba) = (ssim(&a, &b, &cfg).unwrap(), ssim(&b, &a, &cfg).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
        prop_assert_eq!(ssim(&a, &a, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn histogram_is_order_invariant(mut values in prop::collection::vec(-400.0..400.0f64, 1..200), seed in any::<u64>()) {
        let mut a = HistogramStats::new();
        a.extend(values.iter().copied());
        let n = values.len();
        values.rotate_left((seed % n as u64) as usize);
        values.reverse();
        let mut b = HistogramStats::new();
        b.extend(values.iter().copied());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.counts().iter().sum::<u64>(), a.total());
        let cdf = a.abs_cdf_table();
        prop_assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*cdf.last().unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn operators_ignore_thread_count(u in image(40, 0.0, 255.0)) {
        let cfg = DiffConfig::default();
        let run = || (wmc_half_laplace(&u), mean_curvature_fd(&u, &cfg));
        let one = with_threads(1, run).unwrap();
        let three = with_threads(3, run).unwrap();
        prop_assert_eq!(one.0.checksum(), three.0.checksum());
        prop_assert_eq!(one.1.checksum(), three.1.checksum());
    }
}

//! Randomized invariants of the tensor algebra, the operator matrices and
//! the homogeneous models.

use curvlab_core::homogeneous::{builtin, s3xs3_space};
use curvlab_core::operators::{apply_two_form_action, hat_matrix, ring_matrix, spectrum};
use curvlab_core::tensor::{
    hodge_star, kulkarni_nomizu, metric_tensor, riemann_decompose, DenseTensor,
};
use proptest::prelude::*;

fn sym_tensor(dim: usize, values: &[f64]) -> DenseTensor {
    let mut t = DenseTensor::zeros(dim, 2).unwrap();
    let mut next = 0;
    for i in 0..dim {
        for j in i..dim {
            t.set(&[i, j], values[next]);
            t.set(&[j, i], values[next]);
            next += 1;
        }
    }
    t
}

fn two_form(dim: usize, values: &[f64]) -> DenseTensor {
    let mut t = DenseTensor::zeros(dim, 2).unwrap();
    let mut next = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            t.set(&[i, j], values[next]);
            t.set(&[j, i], -values[next]);
            next += 1;
        }
    }
    t
}

fn entries(count: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kulkarni_nomizu_output_validates(
        s in entries(28),
        t in entries(28),
        dim in 4usize..=7,
    ) {
        let s = sym_tensor(dim, &s);
        let t = sym_tensor(dim, &t);
        let r = kulkarni_nomizu(&s, &t).unwrap();
        let scale = 1.0 + r.tensor().max_abs();
        prop_assert!(r.symmetry_residual() <= 1e-12 * scale);
    }

    #[test]
    fn operator_matrices_are_symmetric(
        s in entries(28),
        t in entries(28),
        dim in 4usize..=7,
    ) {
        let r = kulkarni_nomizu(&sym_tensor(dim, &s), &sym_tensor(dim, &t)).unwrap();
        for op in [hat_matrix(&r).unwrap(), ring_matrix(&r).unwrap()] {
            let worst = (&op.entries - op.entries.transpose())
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let scale = 1.0 + op.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(worst <= 1e-12 * scale);
        }
    }

    #[test]
    fn matrix_action_matches_direct_contraction(
        s in entries(28),
        t in entries(28),
        beta in entries(21),
        dim in 4usize..=7,
    ) {
        let r = kulkarni_nomizu(&sym_tensor(dim, &s), &sym_tensor(dim, &t)).unwrap();
        let beta = two_form(dim, &beta);
        let hat = hat_matrix(&r).unwrap();
        let basis = match &hat.basis {
            curvlab_core::operators::OperatorBasis::Ambient(b) => b,
            _ => unreachable!(),
        };
        let direct = basis
            .coordinates(&apply_two_form_action(r.tensor(), &beta).unwrap())
            .unwrap();
        let via_matrix = &hat.entries * basis.coordinates(&beta).unwrap();
        let scale = 1.0 + direct.amax();
        prop_assert!((direct - via_matrix).amax() <= 1e-12 * scale);
    }

    #[test]
    fn decomposition_parts_are_orthogonal(
        s in entries(28),
        t in entries(28),
        dim in 4usize..=7,
    ) {
        let r = kulkarni_nomizu(&sym_tensor(dim, &s), &sym_tensor(dim, &t)).unwrap();
        let parts = riemann_decompose(&r).unwrap();
        let tensors = [
            parts.scalar_part.tensor(),
            parts.traceless_ricci_part.tensor(),
            parts.weyl.tensor(),
        ];
        for a in 0..3 {
            for b in a + 1..3 {
                let norm_a = tensors[a].full_contract(tensors[a]).unwrap().sqrt();
                let norm_b = tensors[b].full_contract(tensors[b]).unwrap().sqrt();
                if norm_a < 1e-9 || norm_b < 1e-9 {
                    continue;
                }
                let cross = tensors[a].full_contract(tensors[b]).unwrap();
                prop_assert!((cross / (norm_a * norm_b)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn spectrum_multiplicities_sum_to_dimension(
        s in entries(28),
        t in entries(28),
        dim in 4usize..=7,
    ) {
        let r = kulkarni_nomizu(&sym_tensor(dim, &s), &sym_tensor(dim, &t)).unwrap();
        let hat = hat_matrix(&r).unwrap();
        let spec = spectrum(&hat, 1e-6).unwrap();
        let total: usize = spec.eigenvalues.iter().map(|c| c.multiplicity).sum();
        prop_assert_eq!(total, hat.entries.nrows());
    }

    #[test]
    fn builtin_bracket_is_antisymmetric_and_satisfies_jacobi(
        x in entries(11),
        y in entries(11),
        z in entries(11),
        which in 0usize..2,
    ) {
        let space = builtin(["aw-su3xsu2", "s3xs3"][which]).unwrap();
        let model = &space.model;
        let n = model.total_dim();
        let (x, y, z) = (&x[..n], &y[..n], &z[..n]);
        let xy = model.bracket(x, y);
        let yx = model.bracket(y, x);
        let scale = 1.0 + xy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            prop_assert!((xy[k] + yx[k]).abs() <= 1e-12 * scale);
        }
        let mut jac = model.bracket(x, &model.bracket(y, z));
        let term2 = model.bracket(y, &model.bracket(z, x));
        let term3 = model.bracket(z, &xy);
        for k in 0..n {
            jac[k] += term2[k] + term3[k];
            prop_assert!(jac[k].abs() <= 1e-9);
        }
    }

    #[test]
    fn random_plane_curvatures_respect_known_bounds(
        x in entries(7),
        y in entries(7),
        which in 0usize..2,
    ) {
        let ids = ["aw-su3xsu2", "s3xs3"];
        let caps = [37.0 / 5.0, 9.0 / 4.0];
        let space = builtin(ids[which]).unwrap();
        let m = space.model.dim_m();
        match space.model.plane_sectional(&x[..m], &y[..m]) {
            Ok(value) => {
                prop_assert!(value >= -1e-9);
                prop_assert!(value <= caps[which] + 1e-9);
            }
            Err(_) => {} // degenerate plane
        }
    }

    #[test]
    fn six_dim_sectional_matches_closed_form(
        x in entries(6),
        y in entries(6),
    ) {
        // Orthonormalize the plane in frame coordinates.
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nx = norm(&x);
        prop_assume!(nx > 1e-3);
        let x: Vec<f64> = x.iter().map(|a| a / nx).collect();
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let mut y: Vec<f64> = y.iter().zip(&x).map(|(b, a)| b - dot * a).collect();
        let ny = norm(&y);
        prop_assume!(ny > 1e-3);
        for v in &mut y {
            *v /= ny;
        }

        // Split a unit tangent vector into its two Lie-algebra arguments.
        let args = |v: &[f64]| {
            let s3 = 3.0f64.sqrt() / 2.0;
            let b = [
                s3 * v[0] + 0.5 * v[3],
                s3 * v[1] + 0.5 * v[4],
                s3 * v[2] + 0.5 * v[5],
            ];
            let c = [-v[3], -v[4], -v[5]];
            (b, c)
        };
        let (b, c) = args(&x);
        let (d, e) = args(&y);
        let ip = |u: &[f64; 3], v: &[f64; 3]| 2.0 * (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]);
        let closed_form = 9.0 / 4.0
            - (8.0
                * (ip(&b, &b) * ip(&e, &e) + ip(&c, &c) * ip(&d, &d)
                    - 2.0 * ip(&b, &c) * ip(&d, &e)
                    - 2.0 * ip(&b, &d) * ip(&c, &e)
                    + 2.0 * ip(&b, &e) * ip(&c, &d))
                + (ip(&b, &e) - ip(&c, &d)).powi(2))
                / 12.0;

        let model = &s3xs3_space().unwrap().model;
        let direct = model.plane_sectional(&x, &y).unwrap();
        prop_assert!((closed_form - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn hodge_star_involution_sign_law(dim in 1usize..=7, rank in 0usize..=7) {
        prop_assume!(rank <= dim);
        let form = if rank == 0 {
            DenseTensor::scalar(dim, 1.0).unwrap()
        } else {
            curvlab_core::tensor::fill_antisymmetric(dim, rank, |idx| {
                if idx.iter().enumerate().all(|(pos, &i)| pos == i) {
                    1.0
                } else {
                    0.0
                }
            })
            .unwrap()
        };
        let twice = hodge_star(&hodge_star(&form, 1).unwrap(), 1).unwrap();
        // In Euclidean signature ⋆⋆ = (−1)^{k(n−k)}.
        let sign = if (rank * (dim - rank)) % 2 == 0 { 1.0 } else { -1.0 };
        let diff = twice.sub(&form.scale(sign)).unwrap();
        prop_assert!(diff.max_abs() == 0.0);
    }
}

#[test]
fn metric_product_with_itself_has_constant_curvature() {
    for dim in 4..=7 {
        let g = metric_tensor(dim).unwrap();
        let r = kulkarni_nomizu(&g, &g).unwrap();
        let parts = riemann_decompose(&r).unwrap();
        assert!(parts.traceless_ricci_part.tensor().max_abs() < 1e-12);
        assert!(parts.weyl.tensor().max_abs() < 1e-12);
    }
}

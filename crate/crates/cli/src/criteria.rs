//! The full check suite: one entry per release criterion, shared between
//! the `verify-all` command and the acceptance test target.

use curvlab_core::curvature::{
    betti_conditions, hat_bound_distinguished, nk_hat8_intersection, nk_ring_plus0_intersection,
    nk_ring_plus_bound, ring_bound_einstein, synthetic_weyl_in,
    weitzenboeck_constants, weyl_term_identity_2form, weyl_term_identity_3form,
    weyl_term_identity_7d, BettiInputs, EinsteinData, ManifoldKind, SectionalBounds, Verdict,
};
use curvlab_core::homogeneous::{s3xs3_space, su3xsu2_space, BuiltinSpace};
use curvlab_core::operators::{
    apply_sym2_action, apply_two_form_action, hat_matrix, restrict, ring_matrix, spectrum,
    sym2_traceless_subspace, OperatorMatrix, CLUSTER_TOL, LEAK_TOL,
};
use curvlab_core::structure::{
    g2_two_form_subspaces, sym2_split_with, sym2_subspaces_from_omega,
    two_form_subspaces_from_omega, G2Model, SU3Model,
};
use curvlab_core::tensor::{
    diamond, kulkarni_nomizu, metric_tensor, ricci, riemann_decompose, CurvatureTensor,
    DenseTensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub status: CriterionStatus,
    pub details: String,
}

type Check = std::result::Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

pub const CRITERIA_COUNT: usize = 11;

fn checks(seed: u64, samples: usize) -> [(&'static str, Box<dyn Fn() -> Check>); CRITERIA_COUNT] {
    [
        ("identity-suites", Box::new(identity_suites)),
        ("seven-dim-example-spectra", Box::new(seven_dim_spectra)),
        ("six-dim-example-spectra", Box::new(six_dim_spectra)),
        ("einstein-fits", Box::new(einstein_fits)),
        (
            "sectional-witnesses-and-sampling",
            Box::new(move || sectional_witnesses(seed, samples)),
        ),
        ("bound-containment", Box::new(bound_containment)),
        ("weyl-shift-minima", Box::new(weyl_shift_minima)),
        ("betti-verdicts", Box::new(betti_verdicts)),
        (
            "weyl-term-identities",
            Box::new(move || weyl_term_identities(seed)),
        ),
        ("algebraic-property-suite", Box::new(move || property_suite(seed))),
        ("weitzenboeck-constants", Box::new(weitzenboeck_exact)),
    ]
}

fn outcome(index: usize, name: &'static str, result: Check) -> CriterionOutcome {
    let (status, details) = match result {
        Ok(d) if d == "skipped" => (CriterionStatus::Skipped, d),
        Ok(d) => (CriterionStatus::Pass, d),
        Err(d) => (CriterionStatus::Fail, d),
    };
    CriterionOutcome {
        index,
        name,
        status,
        details,
    }
}

pub fn run_all(seed: u64, samples: usize) -> Vec<CriterionOutcome> {
    checks(seed, samples)
        .into_iter()
        .enumerate()
        .map(|(i, (name, f))| outcome(i + 1, name, f()))
        .collect()
}

/// Runs a single criterion by its 1-based index.
pub fn run_one(index: usize, seed: u64, samples: usize) -> CriterionOutcome {
    let all = checks(seed, samples);
    let (name, f) = &all[index - 1];
    outcome(index, name, f())
}

// ---------------------------------------------------------------------------
// shared helpers

fn aw() -> std::result::Result<(BuiltinSpace, CurvatureTensor, EinsteinData), String> {
    let space = su3xsu2_space().map_err(err)?;
    let r = space.model.curvature().map_err(err)?;
    let e = space.einstein(&r).map_err(err)?;
    Ok((space, r, e))
}

fn s3s3() -> std::result::Result<(BuiltinSpace, CurvatureTensor, EinsteinData), String> {
    let space = s3xs3_space().map_err(err)?;
    let r = space.model.curvature().map_err(err)?;
    let e = space.einstein(&r).map_err(err)?;
    Ok((space, r, e))
}

fn check_clusters(
    what: &str,
    op: &OperatorMatrix,
    expected: &[(f64, usize)],
) -> std::result::Result<(), String> {
    let spec = spectrum(op, CLUSTER_TOL).map_err(err)?;
    if spec.eigenvalues.len() != expected.len() {
        return Err(format!(
            "{what}: expected {} clusters, found {:?}",
            expected.len(),
            spec.eigenvalues
        ));
    }
    for (cluster, &(value, mult)) in spec.eigenvalues.iter().zip(expected) {
        if (cluster.value - value).abs() > 1e-9 || cluster.multiplicity != mult {
            return Err(format!(
                "{what}: cluster ({}, {}) does not match expected ({value}, {mult})",
                cluster.value, cluster.multiplicity
            ));
        }
    }
    Ok(())
}

fn random_sym(dim: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    let mut t = DenseTensor::zeros(dim, 2).expect("small rank-2");
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-1.0..1.0);
            t.set(&[i, j], v);
            t.set(&[j, i], v);
        }
    }
    t
}

fn random_sym_int(dim: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    let mut t = DenseTensor::zeros(dim, 2).expect("small rank-2");
    for i in 0..dim {
        for j in i..dim {
            let v = rng.gen_range(-3i32..=3) as f64;
            t.set(&[i, j], v);
            t.set(&[j, i], v);
        }
    }
    t
}

fn random_rank2(dim: usize, rng: &mut ChaCha8Rng) -> DenseTensor {
    DenseTensor::from_fn(dim, 2, |_| rng.gen_range(-1.0..1.0)).expect("small rank-2")
}

// ---------------------------------------------------------------------------
// criterion 1

fn identity_suites() -> Check {
    let g2 = G2Model::standard().map_err(err)?;
    let rows = g2.verify_identities();
    if rows.len() != 5 {
        return Err(format!("expected 5 rows for the 7-dim suite, got {}", rows.len()));
    }
    for row in &rows {
        if row.residual != 0.0 {
            return Err(format!("7-dim identity {} residual {:e}", row.label, row.residual));
        }
    }
    let su3 = SU3Model::standard().map_err(err)?;
    let rows = su3.verify_identities();
    if rows.len() != 17 {
        return Err(format!("expected 17 rows for the 6-dim suite, got {}", rows.len()));
    }
    for row in &rows {
        if row.residual != 0.0 {
            return Err(format!("6-dim identity {} residual {:e}", row.label, row.residual));
        }
    }
    Ok("5 + 17 identities, all residuals exactly 0".into())
}

// ---------------------------------------------------------------------------
// criteria 2-3

fn seven_dim_spectra() -> Check {
    let (_space, r, _e) = aw()?;
    check_clusters(
        "2-form action",
        &hat_matrix(&r).map_err(err)?,
        &[(-114.0 / 5.0, 1), (-66.0 / 5.0, 3), (-18.0 / 5.0, 7), (6.0 / 5.0, 10)],
    )?;
    check_clusters(
        "symmetric action",
        &ring_matrix(&r).map_err(err)?,
        &[
            (-54.0 / 5.0, 1),
            (-47.0 / 5.0, 1),
            (-23.0 / 5.0, 7),
            (13.0 / 5.0, 8),
            (5.0, 5),
            (37.0 / 5.0, 6),
        ],
    )?;
    Ok("both full spectra match within 1e-9".into())
}

fn six_dim_spectra() -> Check {
    let (space, r, _e) = s3s3()?;
    check_clusters(
        "2-form action",
        &hat_matrix(&r).map_err(err)?,
        &[(-7.0, 3), (-2.0, 7), (1.0, 5)],
    )?;
    let ring = ring_matrix(&r).map_err(err)?;
    check_clusters(
        "symmetric action",
        &ring,
        &[(-5.0, 1), (-4.0, 2), (-1.5, 3), (2.0, 10), (2.5, 5)],
    )?;
    let omega = space.omega.as_ref().ok_or("missing invariant 2-form")?;
    let (plus0, minus) = sym2_subspaces_from_omega(omega).map_err(err)?;
    check_clusters(
        "commuting traceless block",
        &restrict(&ring, &plus0, LEAK_TOL).map_err(err)?,
        &[(-1.5, 3), (2.5, 5)],
    )?;
    check_clusters(
        "anticommuting block",
        &restrict(&ring, &minus, LEAK_TOL).map_err(err)?,
        &[(-4.0, 2), (2.0, 10)],
    )?;
    Ok("full spectra and block split match within 1e-9".into())
}

// ---------------------------------------------------------------------------
// criterion 4

fn einstein_fits() -> Check {
    for (label, result, k_expected) in [
        ("7-dim example", aw()?, 54.0 / 5.0),
        ("6-dim example", s3s3()?, 5.0),
    ]
    .map(|(l, r, k)| (l, r, k))
    {
        let (_space, r, e) = result;
        let n = r.dim();
        let ric = ricci(&r).map_err(err)?;
        let g = metric_tensor(n).map_err(err)?;
        let residual = ric.sub(&g.scale(e.k)).map_err(err)?.max_abs();
        if residual > 1e-10 {
            return Err(format!("{label}: Einstein residual {residual:e}"));
        }
        if (e.k - k_expected).abs() > 1e-10 {
            return Err(format!("{label}: constant {} vs expected {k_expected}", e.k));
        }
        let scalar: f64 = (0..n).map(|i| ric.get(&[i, i])).sum();
        if (scalar - n as f64 * k_expected).abs() > 1e-9 {
            return Err(format!("{label}: scalar curvature {scalar}"));
        }
    }
    Ok("Ricci = k·g with k = 54/5 and 5, residual < 1e-10".into())
}

// ---------------------------------------------------------------------------
// criterion 5

fn sectional_witnesses(seed: u64, samples: usize) -> Check {
    let (aw_space, _r, _e) = aw()?;
    let (nk_space, _r2, _e2) = s3s3()?;
    for w in &aw_space.witnesses {
        let value = aw_space.model.plane_sectional(&w.x, &w.y).map_err(err)?;
        if (value - w.expected).abs() > 1e-9 {
            return Err(format!("7-dim witness {}: {} vs {}", w.label, value, w.expected));
        }
    }
    for w in &nk_space.witnesses {
        let value = nk_space.model.plane_sectional(&w.x, &w.y).map_err(err)?;
        if (value - w.expected).abs() > 1e-12 {
            return Err(format!("6-dim witness {}: {} vs {}", w.label, value, w.expected));
        }
    }
    if samples == 0 {
        return Ok("skipped".into());
    }
    let scan = aw_space.model.sectional_scan(samples, seed).map_err(err)?;
    if scan.min.value < 0.2 - 1e-9 || scan.max.value > 7.4 + 1e-9 {
        return Err(format!(
            "7-dim sampled range [{}, {}] escapes [1/5, 37/5]",
            scan.min.value, scan.max.value
        ));
    }
    let scan = nk_space.model.sectional_scan(samples, seed).map_err(err)?;
    if scan.min.value < -1e-9 || scan.max.value > 2.25 + 1e-9 {
        return Err(format!(
            "6-dim sampled range [{}, {}] escapes [0, 9/4]",
            scan.min.value, scan.max.value
        ));
    }
    Ok(format!("witnesses exact; {samples} planes per space stay in range"))
}

// ---------------------------------------------------------------------------
// criterion 6

fn bound_containment() -> Check {
    let (space, r, e) = aw()?;
    let sb = SectionalBounds::new(0.2, 7.4).map_err(err)?;
    let (_b7, b14) = space.two_form_blocks(&r, &e).map_err(err)?;
    let hat14 = restrict(&hat_matrix(&r).map_err(err)?, &b14, LEAK_TOL).map_err(err)?;
    let interval = hat_bound_distinguished(&sb);
    let spec = spectrum(&hat14, CLUSTER_TOL).map_err(err)?;
    if !interval.contains_all(&spec.raw, 1e-9) {
        return Err("7-dim distinguished 2-form spectrum escapes [-122/5, 46/5]".into());
    }
    let s20 = sym2_traceless_subspace(7).map_err(err)?;
    let ring0 = restrict(&ring_matrix(&r).map_err(err)?, &s20, LEAK_TOL).map_err(err)?;
    let interval = ring_bound_einstein(&e, &sb).map_err(err)?;
    let spec = spectrum(&ring0, CLUSTER_TOL).map_err(err)?;
    if !interval.contains_all(&spec.raw, 1e-9) {
        return Err("7-dim traceless spectrum escapes [-47/5, 49/5]".into());
    }
    if (spec.raw[0] - interval.lo).abs() > 1e-9 {
        return Err(format!("7-dim lower endpoint not attained: {}", spec.raw[0]));
    }

    let (space, r, e) = s3s3()?;
    let sb = SectionalBounds::new(0.0, 2.25).map_err(err)?;
    let (_p1, p8) = space.two_form_blocks(&r, &e).map_err(err)?;
    let hat8 = restrict(&hat_matrix(&r).map_err(err)?, &p8, LEAK_TOL).map_err(err)?;
    let interval = nk_hat8_intersection(&sb).map_err(err)?;
    let spec = spectrum(&hat8, CLUSTER_TOL).map_err(err)?;
    if !interval.contains_all(&spec.raw, 1e-9) {
        return Err("6-dim distinguished 2-form spectrum escapes [-15/2, 3]".into());
    }
    let s20 = sym2_traceless_subspace(6).map_err(err)?;
    let ring = ring_matrix(&r).map_err(err)?;
    let ring0 = restrict(&ring, &s20, LEAK_TOL).map_err(err)?;
    let interval = ring_bound_einstein(&e, &sb).map_err(err)?;
    let spec = spectrum(&ring0, CLUSTER_TOL).map_err(err)?;
    if !interval.contains_all(&spec.raw, 1e-9) {
        return Err("6-dim traceless spectrum escapes [-4, 5]".into());
    }
    if (spec.raw[0] - interval.lo).abs() > 1e-9 {
        return Err(format!("6-dim lower endpoint not attained: {}", spec.raw[0]));
    }
    let omega = space.omega.as_ref().ok_or("missing invariant 2-form")?;
    let (plus0, _minus) = sym2_subspaces_from_omega(omega).map_err(err)?;
    let ring_plus0 = restrict(&ring, &plus0, LEAK_TOL).map_err(err)?;
    let spec = spectrum(&ring_plus0, CLUSTER_TOL).map_err(err)?;
    let interval = nk_ring_plus0_intersection(&sb).map_err(err)?;
    if !interval.contains_all(&spec.raw, 1e-9) {
        return Err("6-dim commuting-block spectrum escapes [-7/4, 7/2]".into());
    }
    let single = nk_ring_plus_bound(&sb);
    if !single.contains_all(&spec.raw, 1e-9) {
        return Err("6-dim commuting-block spectrum escapes [2δ-Δ, 2Δ-δ]".into());
    }
    Ok("all example spectra sit inside the theorem intervals; sharp endpoints attained".into())
}

// ---------------------------------------------------------------------------
// criterion 7

fn weyl_shift_minima() -> Check {
    let (space, r, e) = aw()?;
    let minima = crate::spaces::spectral_minima(&space, &r, &e).map_err(err)?;
    if (minima.hat_distinguished + 96.0 / 5.0).abs() > 1e-9 {
        return Err(format!("7-dim 2-form minimum {}", minima.hat_distinguished));
    }
    let ring = minima.ring_traceless.ok_or("missing traceless minimum")?;
    if (ring + 56.0 / 5.0).abs() > 1e-9 {
        return Err(format!("7-dim traceless minimum {ring}"));
    }
    let (space, r, e) = s3s3()?;
    let minima = crate::spaces::spectral_minima(&space, &r, &e).map_err(err)?;
    if (minima.hat_distinguished + 5.0).abs() > 1e-9 {
        return Err(format!("6-dim 2-form minimum {}", minima.hat_distinguished));
    }
    let minus = minima.ring_minus.ok_or("missing anticommuting minimum")?;
    if (minus + 5.0).abs() > 1e-9 {
        return Err(format!("6-dim anticommuting minimum {minus}"));
    }
    Ok("-96/5, -56/5, -5, -5 all within 1e-9".into())
}

// ---------------------------------------------------------------------------
// criterion 8

fn betti_verdicts() -> Check {
    let (space, r, e) = s3s3()?;
    let minima = crate::spaces::spectral_minima(&space, &r, &e).map_err(err)?;
    let report =
        betti_conditions(ManifoldKind::NearlyKahler, &BettiInputs::Spectral(minima), &e)
            .map_err(err)?;
    if report.b2 != Verdict::Zero || report.b3 != Verdict::NoConclusion {
        return Err(format!("6-dim spectral verdicts {:?}/{:?}", report.b2, report.b3));
    }
    let sb = SectionalBounds::new(0.0, 2.25).map_err(err)?;
    let report =
        betti_conditions(ManifoldKind::NearlyKahler, &BettiInputs::Sectional(sb), &e)
            .map_err(err)?;
    if report.b2 != Verdict::Zero {
        return Err("6-dim sectional b2 should be zero".into());
    }
    let both_hold = report
        .conditions
        .iter()
        .filter(|c| c.id.starts_with("b2"))
        .all(|c| c.holds);
    if !both_hold {
        return Err("both 6-dim sectional b2 conditions should hold".into());
    }
    let (space, r, e) = aw()?;
    let minima = crate::spaces::spectral_minima(&space, &r, &e).map_err(err)?;
    let report = betti_conditions(ManifoldKind::NearlyG2, &BettiInputs::Spectral(minima), &e)
        .map_err(err)?;
    if report.b2 != Verdict::NoConclusion || report.b3 != Verdict::NoConclusion {
        return Err(format!("7-dim spectral verdicts {:?}/{:?}", report.b2, report.b3));
    }
    Ok("verdicts match: zero / no_conclusion pattern as published".into())
}

// ---------------------------------------------------------------------------
// criterion 9

fn weyl_term_identities(seed: u64) -> Check {
    // 2-form identity with the actual Weyl part of the 6-dim example
    let (space, r, _e) = s3s3()?;
    let omega = space.omega.as_ref().ok_or("missing invariant 2-form")?;
    let w = riemann_decompose(&r).map_err(err)?.weyl;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x2f00));
    for i in 0..50 {
        let h = sym2_split_with(omega, &random_sym(6, &mut rng))
            .map_err(err)?
            .plus0;
        let residual = weyl_term_identity_2form(&w, &h, omega).map_err(err)?;
        if residual > 1e-9 {
            return Err(format!("2-form identity sample {i}: residual {residual:e}"));
        }
    }
    // 3-form identity with synthetic Weyl-type tensors in the 8-dim block
    let su3 = SU3Model::standard().map_err(err)?;
    let (_p1, _p6, p8) = two_form_subspaces_from_omega(su3.omega()).map_err(err)?;
    for block in 0..5 {
        let w = synthetic_weyl_in(&p8, seed.wrapping_add(0x3f00 + block)).map_err(err)?;
        for i in 0..10 {
            let h = sym2_split_with(su3.omega(), &random_sym(6, &mut rng))
                .map_err(err)?
                .minus;
            let report = weyl_term_identity_3form(&w, &h, &su3).map_err(err)?;
            if report.gamma_residual > 1e-9 || report.hat_gamma_residual > 1e-9 {
                return Err(format!(
                    "3-form identity sample {block}/{i}: residuals {:e}, {:e}",
                    report.gamma_residual, report.hat_gamma_residual
                ));
            }
        }
    }
    // 7-dim identity with synthetic Weyl-type tensors in the 14-dim block
    let g2 = G2Model::standard().map_err(err)?;
    let (_p7, p14) = g2_two_form_subspaces(g2.psi()).map_err(err)?;
    for block in 0..5 {
        let w = synthetic_weyl_in(&p14, seed.wrapping_add(0x4f00 + block)).map_err(err)?;
        for i in 0..10 {
            let mut h = random_sym(7, &mut rng);
            let partial: f64 = (0..6).map(|d| h.get(&[d, d])).sum();
            h.set(&[6, 6], -partial);
            let report = weyl_term_identity_7d(&w, &h, &g2).map_err(err)?;
            if report.gamma_residual > 1e-9 || report.hat_gamma_residual > 1e-9 {
                return Err(format!(
                    "7-dim identity sample {block}/{i}: residuals {:e}, {:e}",
                    report.gamma_residual, report.hat_gamma_residual
                ));
            }
        }
    }
    Ok("50 samples per identity, all residuals < 1e-9".into())
}

// ---------------------------------------------------------------------------
// criterion 10

fn property_suite(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5f00));
    for i in 0..100 {
        let dim = if i % 2 == 0 { 6 } else { 7 };
        let s = random_sym_int(dim, &mut rng);
        let t = random_sym_int(dim, &mut rng);
        let product = kulkarni_nomizu(&s, &t).map_err(|e| format!("product {i}: {e}"))?;
        let hat = hat_matrix(&product).map_err(err)?;
        let ring = ring_matrix(&product).map_err(err)?;
        for m in [&hat.entries, &ring.entries] {
            let asym = (m - m.transpose()).abs().max();
            if asym > 1e-12 {
                return Err(format!("operator matrix asymmetry {asym:e} at sample {i}"));
            }
        }
        let scale = product.tensor().max_abs().max(1.0);
        let normalized =
            CurvatureTensor::new(product.tensor().scale(1.0 / scale), 1e-12).map_err(err)?;
        let parts = riemann_decompose(&normalized).map_err(err)?;
        let pieces = [&parts.scalar_part, &parts.traceless_ricci_part, &parts.weyl];
        for a in 0..3 {
            for b in a + 1..3 {
                let inner = pieces[a]
                    .tensor()
                    .full_contract(pieces[b].tensor())
                    .map_err(err)?;
                if inner.abs() > 1e-9 {
                    return Err(format!("decomposition parts not orthogonal: {inner:e}"));
                }
            }
        }
    }

    // derivation-action decode round trips
    let g2 = G2Model::standard().map_err(err)?;
    let su3 = SU3Model::standard().map_err(err)?;
    for _ in 0..20 {
        let t7 = random_rank2(7, &mut rng);
        let gamma = diamond(&t7, g2.phi()).map_err(err)?;
        let decode = g2.decode_3form(&gamma).map_err(err)?;
        let rebuilt = diamond(&decode.tensor, g2.phi()).map_err(err)?;
        if rebuilt.sub(&gamma).map_err(err)?.max_abs() > 1e-12 {
            return Err("7-dim 3-form decode round trip exceeded 1e-12".into());
        }
        let t6 = random_rank2(6, &mut rng);
        for (form, decode_fn) in [
            (su3.omega(), 0usize),
            (su3.psi_plus(), 1),
            (su3.star_omega(), 2),
        ] {
            let image = diamond(&t6, form).map_err(err)?;
            let decode = match decode_fn {
                0 => su3.decode_2form(&image),
                1 => su3.decode_3form(&image),
                _ => su3.decode_4form(&image),
            }
            .map_err(err)?;
            let rebuilt = diamond(&decode.tensor, form).map_err(err)?;
            if rebuilt.sub(&image).map_err(err)?.max_abs() > 1e-12 {
                return Err(format!("6-dim rank-{} decode round trip exceeded 1e-12", decode_fn + 2));
            }
        }
    }

    // metric product acts as exact multiples of the identity
    for dim in [6usize, 7] {
        let g = metric_tensor(dim).map_err(err)?;
        let gg = kulkarni_nomizu(&g, &g).map_err(err)?;
        for i in 0..dim {
            for j in i + 1..dim {
                let mut beta = DenseTensor::zeros(dim, 2).map_err(err)?;
                beta.set(&[i, j], 1.0);
                beta.set(&[j, i], -1.0);
                let image = apply_two_form_action(gg.tensor(), &beta).map_err(err)?;
                if image.sub(&beta.scale(-4.0)).map_err(err)?.max_abs() != 0.0 {
                    return Err("2-form action of g⊛g is not exactly -4·Id".into());
                }
                let mut h = DenseTensor::zeros(dim, 2).map_err(err)?;
                h.set(&[i, j], 1.0);
                h.set(&[j, i], 1.0);
                let image = apply_sym2_action(gg.tensor(), &h).map_err(err)?;
                if image.sub(&h.scale(2.0)).map_err(err)?.max_abs() != 0.0 {
                    return Err("symmetric action of g⊛g is not exactly 2·Id off-diagonal".into());
                }
            }
            if i + 1 < dim {
                let mut h = DenseTensor::zeros(dim, 2).map_err(err)?;
                h.set(&[i, i], 1.0);
                h.set(&[i + 1, i + 1], -1.0);
                let image = apply_sym2_action(gg.tensor(), &h).map_err(err)?;
                if image.sub(&h.scale(2.0)).map_err(err)?.max_abs() != 0.0 {
                    return Err("symmetric action of g⊛g is not exactly 2·Id on diagonal".into());
                }
            }
        }
    }
    Ok("100 products validated; orthogonality, round trips and identity actions hold".into())
}

// ---------------------------------------------------------------------------
// criterion 11

fn weitzenboeck_exact() -> Check {
    let tau0 = -4.0f64;
    let e7 = EinsteinData::from_tau0(tau0).map_err(err)?;
    let t2 = tau0 * tau0;
    let (c2, c3) = weitzenboeck_constants(&e7);
    if c2 != 5.0 * t2 / 8.0 || c3 != 3.0 * t2 / 4.0 {
        return Err(format!("7-dim constants ({c2}, {c3})"));
    }
    let e6 = EinsteinData::nearly_kahler();
    let (c2, c3) = weitzenboeck_constants(&e6);
    if c2 != 8.0 || c3 != 9.0 {
        return Err(format!("6-dim constants ({c2}, {c3})"));
    }
    Ok("(5τ₀²/8, 3τ₀²/4) and (8, 9), exact".into())
}

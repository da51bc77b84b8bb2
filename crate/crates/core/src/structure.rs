//! Cross-product structure forms in dimensions 7 and 6, their contraction
//! identity suites, and the induced splittings of 2-forms and symmetric
//! 2-tensors.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::operators::{
    spectrum, FormBasis, OperatorBasis, OperatorMatrix, SubspaceBasis, SubspaceLabel, CLUSTER_TOL,
};
use crate::tensor::{hodge_star, metric_tensor, wedge, DenseTensor};
use crate::Result;

#[derive(Debug, Clone, serde::Serialize)]
pub struct IdentityResidual {
    pub label: String,
    pub residual: f64,
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn residual_gate(rows: &[IdentityResidual]) -> Result<()> {
    for row in rows {
        if row.residual > 1e-12 {
            return Err(Error::StructureIdentity {
                label: row.label.clone(),
                residual: row.residual,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dimension 7

/// Cross-product 3-form and its dual 4-form on the standard frame of R^7.
#[derive(Debug, Clone)]
pub struct G2Model {
    phi: DenseTensor,
    psi: DenseTensor,
}

impl G2Model {
    /// The standard 3-form
    /// `e^{123} + e^{145} + e^{167} + e^{246} − e^{257} − e^{347} − e^{356}`
    /// with its Hodge dual; construction fails if any contraction identity
    /// has a nonzero residual.
    pub fn standard() -> Result<Self> {
        let terms: [(usize, usize, usize, f64); 7] = [
            (0, 1, 2, 1.0),
            (0, 3, 4, 1.0),
            (0, 5, 6, -1.0),
            (1, 3, 6, 1.0),
            (1, 4, 5, -1.0),
            (2, 3, 5, -1.0),
            (2, 4, 6, -1.0),
        ];
        let mut phi = DenseTensor::zeros(7, 3)?;
        for (i, j, k, c) in terms {
            let mut term = DenseTensor::zeros(7, 1)?;
            term.set(&[i], 1.0);
            let mut ej = DenseTensor::zeros(7, 1)?;
            ej.set(&[j], 1.0);
            let mut ek = DenseTensor::zeros(7, 1)?;
            ek.set(&[k], 1.0);
            phi.add_scaled(&wedge(&term, &wedge(&ej, &ek)?)?, c)?;
        }
        let psi = hodge_star(&phi, 1)?;
        Self::from_parts(phi, psi)
    }

    pub fn from_parts(phi: DenseTensor, psi: DenseTensor) -> Result<Self> {
        let model = Self::from_parts_unchecked(phi, psi);
        residual_gate(&model.verify_identities())?;
        Ok(model)
    }

    /// Skips the identity gate; intended for negative controls in tests.
    pub fn from_parts_unchecked(phi: DenseTensor, psi: DenseTensor) -> Self {
        G2Model { phi, psi }
    }

    pub fn phi(&self) -> &DenseTensor {
        &self.phi
    }

    pub fn psi(&self) -> &DenseTensor {
        &self.psi
    }

    /// Residuals of the five contraction identities relating the 3-form,
    /// its dual 4-form and the metric.
    pub fn verify_identities(&self) -> Vec<IdentityResidual> {
        let phi = &self.phi;
        let psi = &self.psi;
        let n = 7;
        let mut rows = Vec::new();

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let lhs: f64 =
                            (0..n).map(|k| phi.get(&[i, j, k]) * phi.get(&[a, b, k])).sum();
                        let rhs = delta(i, a) * delta(j, b)
                            - delta(i, b) * delta(j, a)
                            - psi.get(&[i, j, a, b]);
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
        rows.push(IdentityResidual {
            label: "phi_phi_1".into(),
            residual: worst,
        });

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let lhs: f64 = (0..n)
                                .map(|k| phi.get(&[i, j, k]) * psi.get(&[a, b, c, k]))
                                .sum();
                            let rhs = delta(i, a) * phi.get(&[j, b, c])
                                + delta(i, b) * phi.get(&[a, j, c])
                                + delta(i, c) * phi.get(&[a, b, j])
                                - delta(a, j) * phi.get(&[i, b, c])
                                - delta(b, j) * phi.get(&[a, i, c])
                                - delta(c, j) * phi.get(&[a, b, i]);
                            worst = worst.max((lhs - rhs).abs());
                        }
                    }
                }
            }
        }
        rows.push(IdentityResidual {
            label: "phi_psi_1".into(),
            residual: worst,
        });

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let lhs: f64 = (0..n)
                        .flat_map(|j| (0..n).map(move |k| (j, k)))
                        .map(|(j, k)| phi.get(&[i, j, k]) * psi.get(&[a, b, j, k]))
                        .sum();
                    let rhs = -4.0 * phi.get(&[i, a, b]);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        rows.push(IdentityResidual {
            label: "phi_psi_2".into(),
            residual: worst,
        });

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let lhs: f64 = (0..n)
                            .flat_map(|k| (0..n).map(move |l| (k, l)))
                            .map(|(k, l)| psi.get(&[i, j, k, l]) * psi.get(&[a, b, k, l]))
                            .sum();
                        let rhs = 4.0 * delta(i, a) * delta(j, b)
                            - 4.0 * delta(i, b) * delta(j, a)
                            - 2.0 * psi.get(&[i, j, a, b]);
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
        rows.push(IdentityResidual {
            label: "psi_psi_2".into(),
            residual: worst,
        });

        let mut worst: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                let mut lhs = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            lhs += psi.get(&[i, j, k, l]) * psi.get(&[a, j, k, l]);
                        }
                    }
                }
                worst = worst.max((lhs - 24.0 * delta(i, a)).abs());
            }
        }
        rows.push(IdentityResidual {
            label: "psi_psi_3".into(),
            residual: worst,
        });

        rows
    }

    /// Split of a 2-form into its 7- and 14-dimensional components.
    pub fn project_2form(&self, beta: &DenseTensor) -> Result<G2TwoFormSplit> {
        expect_form(beta, 7, 2)?;
        let phi = &self.phi;
        let x = DenseTensor::from_fn(7, 1, |idx| {
            let mut total = 0.0;
            for i in 0..7 {
                for j in 0..7 {
                    total += beta.get(&[i, j]) * phi.get(&[i, j, idx[0]]);
                }
            }
            total / 6.0
        })?;
        let part7 = DenseTensor::from_fn(7, 2, |idx| {
            (0..7).map(|k| x.get(&[k]) * phi.get(&[k, idx[0], idx[1]])).sum()
        })?;
        let part14 = beta.sub(&part7)?;
        Ok(G2TwoFormSplit {
            vector: x,
            part7,
            part14,
        })
    }

    /// Reads a rank-2 tensor off a 3-form through the contraction
    /// `γ̂_{ia} = γ_{ijk} φ_{ajk}` and splits it into trace, traceless
    /// symmetric and vector-type parts.
    pub fn decode_3form(&self, gamma: &DenseTensor) -> Result<G2ThreeFormDecode> {
        expect_form(gamma, 7, 3)?;
        let phi = &self.phi;
        let hat = DenseTensor::from_fn(7, 2, |idx| {
            let mut total = 0.0;
            for j in 0..7 {
                for k in 0..7 {
                    total += gamma.get(&[idx[0], j, k]) * phi.get(&[idx[1], j, k]);
                }
            }
            total
        })?;
        let tr_hat: f64 = (0..7).map(|i| hat.get(&[i, i])).sum();
        let trace = tr_hat / 18.0;
        let g = metric_tensor(7)?;
        let mut sym0 = DenseTensor::from_fn(7, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) + hat.get(&[idx[1], idx[0]])) / 8.0
        })?;
        sym0.add_scaled(&g, -tr_hat / 28.0)?;
        let skew = DenseTensor::from_fn(7, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) - hat.get(&[idx[1], idx[0]])) / 24.0
        })?;
        let mut full = g.scale(trace / 7.0);
        full.add_scaled(&sym0, 1.0)?;
        full.add_scaled(&skew, 1.0)?;
        Ok(G2ThreeFormDecode {
            hat,
            trace,
            traceless_sym: sym0,
            vector_part: skew,
            tensor: full,
        })
    }
}

#[derive(Debug, Clone)]
pub struct G2TwoFormSplit {
    pub vector: DenseTensor,
    pub part7: DenseTensor,
    pub part14: DenseTensor,
}

#[derive(Debug, Clone)]
pub struct G2ThreeFormDecode {
    pub hat: DenseTensor,
    pub trace: f64,
    pub traceless_sym: DenseTensor,
    pub vector_part: DenseTensor,
    /// rank-2 tensor whose derivation action on the 3-form recovers the input
    pub tensor: DenseTensor,
}

fn expect_form(t: &DenseTensor, dim: usize, rank: usize) -> Result<()> {
    if t.dim() != dim {
        return Err(Error::DimMismatch(t.dim(), dim));
    }
    if t.rank() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            got: t.rank(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dimension 6

/// Almost-Hermitian structure forms on the standard frame of R^6: the
/// Kähler-type 2-form, the real and imaginary parts of the complex volume
/// form, and the dual of the 2-form.
#[derive(Debug, Clone)]
pub struct SU3Model {
    omega: DenseTensor,
    psi_plus: DenseTensor,
    psi_minus: DenseTensor,
    star_omega: DenseTensor,
}

impl SU3Model {
    pub fn standard() -> Result<Self> {
        Self::from_g2(&G2Model::standard()?)
    }

    /// Reduction along the first frame direction: with `e_0` as the cone
    /// direction, `ω_{ij} = −φ_{0ij}`, `ψ⁺ = φ` and `ψ⁻ = −ψ_0...` on the
    /// remaining six directions.
    pub fn from_g2(g2: &G2Model) -> Result<Self> {
        let phi = g2.phi();
        let psi = g2.psi();
        let omega = DenseTensor::from_fn(6, 2, |idx| -phi.get(&[0, idx[0] + 1, idx[1] + 1]))?;
        let psi_plus =
            DenseTensor::from_fn(6, 3, |idx| phi.get(&[idx[0] + 1, idx[1] + 1, idx[2] + 1]))?;
        let psi_minus =
            DenseTensor::from_fn(6, 3, |idx| -psi.get(&[0, idx[0] + 1, idx[1] + 1, idx[2] + 1]))?;
        let star_omega = DenseTensor::from_fn(6, 4, |idx| {
            -psi.get(&[idx[0] + 1, idx[1] + 1, idx[2] + 1, idx[3] + 1])
        })?;
        let model = SU3Model {
            omega,
            psi_plus,
            psi_minus,
            star_omega,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_parts_unchecked(
        omega: DenseTensor,
        psi_plus: DenseTensor,
        psi_minus: DenseTensor,
        star_omega: DenseTensor,
    ) -> Self {
        SU3Model {
            omega,
            psi_plus,
            psi_minus,
            star_omega,
        }
    }

    pub fn omega(&self) -> &DenseTensor {
        &self.omega
    }

    pub fn psi_plus(&self) -> &DenseTensor {
        &self.psi_plus
    }

    pub fn psi_minus(&self) -> &DenseTensor {
        &self.psi_minus
    }

    pub fn star_omega(&self) -> &DenseTensor {
        &self.star_omega
    }

    fn validate(&self) -> Result<()> {
        residual_gate(&self.verify_identities())?;
        // Hodge duality relations and the square of the 2-form.
        let checks = [
            (
                "star_psi_plus",
                hodge_star(&self.psi_plus, 1)?.sub(&self.psi_minus)?.max_abs(),
            ),
            (
                "star_psi_minus",
                hodge_star(&self.psi_minus, 1)?.add(&self.psi_plus)?.max_abs(),
            ),
            (
                "star_omega_is_half_square",
                hodge_star(&self.omega, 1)?
                    .sub(&wedge(&self.omega, &self.omega)?.scale(0.5))?
                    .max_abs(),
            ),
            ("omega_orthogonal", {
                let mut worst: f64 = 0.0;
                for k in 0..6 {
                    for l in 0..6 {
                        let lhs: f64 =
                            (0..6).map(|i| self.omega.get(&[i, k]) * self.omega.get(&[i, l])).sum();
                        worst = worst.max((lhs - delta(k, l)).abs());
                    }
                }
                worst
            }),
            ("omega_trace_free_psi", {
                let mut worst: f64 = 0.0;
                for i in 0..6 {
                    let mut plus = 0.0;
                    let mut minus = 0.0;
                    for j in 0..6 {
                        for k in 0..6 {
                            plus += self.psi_plus.get(&[i, j, k]) * self.omega.get(&[j, k]);
                            minus += self.psi_minus.get(&[i, j, k]) * self.omega.get(&[j, k]);
                        }
                    }
                    worst = worst.max(plus.abs()).max(minus.abs());
                }
                worst
            }),
        ];
        for (label, residual) in checks {
            if residual > 1e-12 {
                return Err(Error::StructureIdentity {
                    label: label.into(),
                    residual,
                });
            }
        }
        Ok(())
    }

    /// Residuals of the seventeen contraction identities among the
    /// structure forms.
    pub fn verify_identities(&self) -> Vec<IdentityResidual> {
        let om = &self.omega;
        let pp = &self.psi_plus;
        let pm = &self.psi_minus;
        let so = &self.star_omega;
        let n = 6;
        let mut rows = Vec::new();
        let mut push = |label: &str, residual: f64| {
            rows.push(IdentityResidual {
                label: label.into(),
                residual,
            })
        };

        let contract3 = |t: &DenseTensor, i: usize, j: usize, a: usize| -> f64 {
            (0..n).map(|k| t.get(&[i, j, k]) * om.get(&[a, k])).sum()
        };

        let mut w1: f64 = 0.0;
        let mut w2: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    w1 = w1.max((contract3(pp, i, j, a) + pm.get(&[i, j, a])).abs());
                    w2 = w2.max((contract3(pm, i, j, a) - pp.get(&[i, j, a])).abs());
                }
            }
        }
        push("pi1", w1);
        push("pi2", w2);

        let mut w3: f64 = 0.0;
        let mut w5: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let lhs3: f64 =
                            (0..n).map(|k| pp.get(&[i, j, k]) * pp.get(&[a, b, k])).sum();
                        let rhs3 = delta(i, a) * delta(j, b) - delta(i, b) * delta(j, a)
                            - om.get(&[i, a]) * om.get(&[j, b])
                            + om.get(&[i, b]) * om.get(&[j, a]);
                        w3 = w3.max((lhs3 - rhs3).abs());

                        let lhs5: f64 =
                            (0..n).map(|k| pp.get(&[i, j, k]) * pm.get(&[a, b, k])).sum();
                        let rhs5 = delta(i, a) * om.get(&[j, b]) + delta(j, b) * om.get(&[i, a])
                            - delta(i, b) * om.get(&[j, a])
                            - delta(j, a) * om.get(&[i, b]);
                        w5 = w5.max((lhs5 - rhs5).abs());
                    }
                }
            }
        }
        push("pi3", w3);

        let two_contract = |s: &DenseTensor, t: &DenseTensor, i: usize, a: usize| -> f64 {
            let mut total = 0.0;
            for j in 0..n {
                for k in 0..n {
                    total += s.get(&[i, j, k]) * t.get(&[a, j, k]);
                }
            }
            total
        };
        let mut w4: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                w4 = w4.max((two_contract(pp, pp, i, a) - 4.0 * delta(i, a)).abs());
            }
        }
        push("pi4", w4);
        push("pi5", w5);

        let mut w6: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                w6 = w6.max((two_contract(pp, pm, i, a) - 4.0 * om.get(&[i, a])).abs());
            }
        }
        push("pi6", w6);

        let mut w7: f64 = 0.0;
        let mut w8: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let lhs: f64 =
                            (0..n).map(|k| pm.get(&[i, j, k]) * pm.get(&[a, b, k])).sum();
                        let rhs = delta(i, a) * delta(j, b) - delta(i, b) * delta(j, a)
                            - om.get(&[i, a]) * om.get(&[j, b])
                            + om.get(&[i, b]) * om.get(&[j, a]);
                        w7 = w7.max((lhs - rhs).abs());
                    }
                }
            }
        }
        push("pi7", w7);
        for i in 0..n {
            for a in 0..n {
                w8 = w8.max((two_contract(pm, pm, i, a) - 4.0 * delta(i, a)).abs());
            }
        }
        push("pi8", w8);

        let mut w9: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let lhs: f64 =
                            (0..n).map(|k| om.get(&[i, k]) * so.get(&[a, b, c, k])).sum();
                        let rhs = delta(i, a) * om.get(&[b, c])
                            + delta(i, b) * om.get(&[c, a])
                            + delta(i, c) * om.get(&[a, b]);
                        w9 = w9.max((lhs - rhs).abs());
                    }
                }
            }
        }
        push("pi9", w9);

        let mut w10: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let lhs: f64 = (0..n)
                    .flat_map(|i| (0..n).map(move |k| (i, k)))
                    .map(|(i, k)| om.get(&[i, k]) * so.get(&[a, b, i, k]))
                    .sum();
                w10 = w10.max((lhs - 4.0 * om.get(&[a, b])).abs());
            }
        }
        push("pi10", w10);

        let mut w11: f64 = 0.0;
        let mut w12: f64 = 0.0;
        let mut w14: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let lhs_p: f64 =
                                (0..n).map(|k| pp.get(&[i, j, k]) * so.get(&[a, b, c, k])).sum();
                            let rhs11 = -delta(i, a) * pp.get(&[j, b, c])
                                - delta(i, b) * pp.get(&[a, j, c])
                                - delta(i, c) * pp.get(&[a, b, j])
                                + delta(a, j) * pp.get(&[i, b, c])
                                + delta(b, j) * pp.get(&[a, i, c])
                                + delta(c, j) * pp.get(&[a, b, i])
                                - om.get(&[i, j]) * pm.get(&[a, b, c]);
                            w11 = w11.max((lhs_p - rhs11).abs());
                            let rhs12 = -pm.get(&[i, j, a]) * om.get(&[b, c])
                                - pm.get(&[i, j, b]) * om.get(&[c, a])
                                - pm.get(&[i, j, c]) * om.get(&[a, b]);
                            w12 = w12.max((lhs_p - rhs12).abs());

                            let lhs_m: f64 =
                                (0..n).map(|k| pm.get(&[i, j, k]) * so.get(&[a, b, c, k])).sum();
                            let rhs14 = pp.get(&[i, j, a]) * om.get(&[b, c])
                                + pp.get(&[i, j, b]) * om.get(&[c, a])
                                + pp.get(&[i, j, c]) * om.get(&[a, b]);
                            w14 = w14.max((lhs_m - rhs14).abs());
                        }
                    }
                }
            }
        }
        push("pi11", w11);
        push("pi12", w12);

        let mut w13: f64 = 0.0;
        let mut w15: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut lhs_p = 0.0;
                    let mut lhs_m = 0.0;
                    for j in 0..n {
                        for k in 0..n {
                            lhs_p += pp.get(&[i, j, k]) * so.get(&[a, b, j, k]);
                            lhs_m += pm.get(&[i, j, k]) * so.get(&[a, b, j, k]);
                        }
                    }
                    w13 = w13.max((lhs_p - 2.0 * pp.get(&[i, a, b])).abs());
                    w15 = w15.max((lhs_m - 2.0 * pm.get(&[i, a, b])).abs());
                }
            }
        }
        push("pi13", w13);
        push("pi14", w14);
        push("pi15", w15);

        let mut w16: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let mut lhs = 0.0;
                        for k in 0..n {
                            for l in 0..n {
                                lhs += so.get(&[i, j, k, l]) * so.get(&[a, b, k, l]);
                            }
                        }
                        let rhs = 2.0 * delta(i, a) * delta(j, b)
                            - 2.0 * delta(i, b) * delta(j, a)
                            + 2.0 * om.get(&[i, j]) * om.get(&[a, b]);
                        w16 = w16.max((lhs - rhs).abs());
                    }
                }
            }
        }
        push("pi16", w16);

        let mut w17: f64 = 0.0;
        for i in 0..n {
            for a in 0..n {
                let mut lhs = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            lhs += so.get(&[i, j, k, l]) * so.get(&[a, j, k, l]);
                        }
                    }
                }
                w17 = w17.max((lhs - 12.0 * delta(i, a)).abs());
            }
        }
        push("pi17", w17);

        rows
    }

    /// Split of a 2-form into its 1-, 6- and 8-dimensional components.
    pub fn project_2form(&self, beta: &DenseTensor) -> Result<SU3TwoFormSplit> {
        expect_form(beta, 6, 2)?;
        let mut lambda = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                lambda += beta.get(&[i, j]) * self.omega.get(&[i, j]);
            }
        }
        lambda /= 6.0;
        let x = DenseTensor::from_fn(6, 1, |idx| {
            let mut total = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    total += beta.get(&[i, j]) * self.psi_plus.get(&[idx[0], i, j]);
                }
            }
            total / 4.0
        })?;
        let part6 = DenseTensor::from_fn(6, 2, |idx| {
            (0..6)
                .map(|a| x.get(&[a]) * self.psi_plus.get(&[a, idx[0], idx[1]]))
                .sum()
        })?;
        let mut part8 = beta.sub(&self.omega.scale(lambda))?;
        part8.add_scaled(&part6, -1.0)?;
        Ok(SU3TwoFormSplit {
            lambda,
            vector: x,
            part6,
            part8,
        })
    }

    /// `(Pβ)_{ab} = ½ β_{ij} (⋆ω)_{ijab}`; acts as `2π₁ + π₆ − π₈`.
    pub fn p_map(&self, beta: &DenseTensor) -> Result<DenseTensor> {
        p_map_with(&self.star_omega, beta)
    }

    /// Rank-2 tensor read off a 2-form through `β̂_{ia} = β_{ik} ω_{ak}`,
    /// with its trace, vector and traceless commuting parts.
    pub fn decode_2form(&self, beta: &DenseTensor) -> Result<SU3Decode> {
        expect_form(beta, 6, 2)?;
        let hat = DenseTensor::from_fn(6, 2, |idx| {
            (0..6)
                .map(|k| beta.get(&[idx[0], k]) * self.omega.get(&[idx[1], k]))
                .sum()
        })?;
        let tr_hat: f64 = (0..6).map(|i| hat.get(&[i, i])).sum();
        let x = DenseTensor::from_fn(6, 1, |idx| {
            let mut total = 0.0;
            for i in 0..6 {
                for a in 0..6 {
                    total += hat.get(&[i, a]) * self.psi_plus.get(&[idx[0], i, a]);
                }
            }
            total / 8.0
        })?;
        let g = metric_tensor(6)?;
        let mut plus0 = DenseTensor::from_fn(6, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) + hat.get(&[idx[1], idx[0]])) / 4.0
        })?;
        plus0.add_scaled(&g, -tr_hat / 12.0)?;
        Ok(SU3Decode {
            tensor: hat.scale(0.5),
            hat,
            trace: tr_hat / 12.0,
            lambda: None,
            vector: x,
            sym_part: plus0,
        })
    }

    /// Rank-2 tensor read off a 3-form through `β̂_{ia} = γ_{ijk} ψ⁺_{ajk}`.
    pub fn decode_3form(&self, gamma: &DenseTensor) -> Result<SU3Decode> {
        expect_form(gamma, 6, 3)?;
        let hat = DenseTensor::from_fn(6, 2, |idx| {
            let mut total = 0.0;
            for j in 0..6 {
                for k in 0..6 {
                    total += gamma.get(&[idx[0], j, k]) * self.psi_plus.get(&[idx[1], j, k]);
                }
            }
            total
        })?;
        let tr_hat: f64 = (0..6).map(|i| hat.get(&[i, i])).sum();
        let mut lambda = 0.0;
        for i in 0..6 {
            for a in 0..6 {
                lambda += hat.get(&[i, a]) * self.omega.get(&[i, a]);
            }
        }
        lambda /= 72.0;
        let x = DenseTensor::from_fn(6, 1, |idx| {
            let mut total = 0.0;
            for i in 0..6 {
                for a in 0..6 {
                    total += hat.get(&[i, a]) * self.psi_plus.get(&[idx[0], i, a]);
                }
            }
            total / 16.0
        })?;
        let g = metric_tensor(6)?;
        let mut minus = DenseTensor::from_fn(6, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) + hat.get(&[idx[1], idx[0]])) / 8.0
        })?;
        minus.add_scaled(&g, -tr_hat / 24.0)?;
        let trace = tr_hat / 12.0;
        // tensor whose derivation action on ψ⁺ rebuilds the 3-form
        let mut full = g.scale(trace / 6.0);
        full.add_scaled(&self.omega, lambda)?;
        let x_interior = DenseTensor::from_fn(6, 2, |idx| {
            (0..6)
                .map(|a| x.get(&[a]) * self.psi_plus.get(&[a, idx[0], idx[1]]))
                .sum()
        })?;
        full.add_scaled(&x_interior, 1.0)?;
        full.add_scaled(&minus, 1.0)?;
        Ok(SU3Decode {
            tensor: full,
            hat,
            trace,
            lambda: Some(lambda),
            vector: x,
            sym_part: minus,
        })
    }

    /// Rank-2 tensor read off a 4-form through `β̂_{ia} = σ_{ijkl} (⋆ω)_{ajkl}`.
    pub fn decode_4form(&self, sigma: &DenseTensor) -> Result<SU3Decode> {
        expect_form(sigma, 6, 4)?;
        let hat = DenseTensor::from_fn(6, 2, |idx| {
            let mut total = 0.0;
            for j in 0..6 {
                for k in 0..6 {
                    for l in 0..6 {
                        total += sigma.get(&[idx[0], j, k, l]) * self.star_omega.get(&[idx[1], j, k, l]);
                    }
                }
            }
            total
        })?;
        let tr_hat: f64 = (0..6).map(|i| hat.get(&[i, i])).sum();
        let trace = tr_hat / 48.0;
        let skew = DenseTensor::from_fn(6, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) - hat.get(&[idx[1], idx[0]])) / 24.0
        })?;
        let g = metric_tensor(6)?;
        let mut plus0 = DenseTensor::from_fn(6, 2, |idx| {
            (hat.get(&[idx[0], idx[1]]) + hat.get(&[idx[1], idx[0]])) / 24.0
        })?;
        plus0.add_scaled(&g, -tr_hat / 72.0)?;
        let x = DenseTensor::from_fn(6, 1, |idx| {
            let mut total = 0.0;
            for i in 0..6 {
                for a in 0..6 {
                    total += skew.get(&[i, a]) * self.psi_plus.get(&[idx[0], i, a]);
                }
            }
            total / 4.0
        })?;
        let mut full = g.scale(trace / 6.0);
        full.add_scaled(&skew, 1.0)?;
        full.add_scaled(&plus0, 1.0)?;
        Ok(SU3Decode {
            tensor: full,
            hat,
            trace,
            lambda: None,
            vector: x,
            sym_part: plus0,
        })
    }

    /// Split of a symmetric 2-tensor into trace, commuting-traceless and
    /// anticommuting parts relative to the 2-form.
    pub fn sym2_split(&self, h: &DenseTensor) -> Result<Sym2Split> {
        sym2_split_with(&self.omega, h)
    }
}

#[derive(Debug, Clone)]
pub struct SU3TwoFormSplit {
    pub lambda: f64,
    pub vector: DenseTensor,
    pub part6: DenseTensor,
    pub part8: DenseTensor,
}

#[derive(Debug, Clone)]
pub struct SU3Decode {
    /// rank-2 tensor whose derivation action rebuilds the input form
    pub tensor: DenseTensor,
    pub hat: DenseTensor,
    pub trace: f64,
    pub lambda: Option<f64>,
    pub vector: DenseTensor,
    pub sym_part: DenseTensor,
}

#[derive(Debug, Clone)]
pub struct Sym2Split {
    pub trace: f64,
    pub plus0: DenseTensor,
    pub minus: DenseTensor,
}

/// `(Pβ)_{ab} = ½ β_{ij} τ_{ijab}` for a 4-form `τ`.
pub fn p_map_with(star_omega: &DenseTensor, beta: &DenseTensor) -> Result<DenseTensor> {
    let n = beta.dim();
    if star_omega.dim() != n {
        return Err(Error::DimMismatch(star_omega.dim(), n));
    }
    DenseTensor::from_fn(n, 2, |idx| {
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += beta.get(&[i, j]) * star_omega.get(&[i, j, idx[0], idx[1]]);
            }
        }
        total / 2.0
    })
}

fn rank2_matmul(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    let n = a.dim();
    DenseTensor::from_fn(n, 2, |idx| {
        (0..n).map(|k| a.get(&[idx[0], k]) * b.get(&[k, idx[1]])).sum()
    })
}

/// Symmetric-tensor split relative to an orthogonal complex structure
/// given as a 2-form matrix with `ω² = −1`.
pub fn sym2_split_with(omega: &DenseTensor, h: &DenseTensor) -> Result<Sym2Split> {
    if h.rank() != 2 || omega.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: h.rank().max(omega.rank()),
        });
    }
    let n = h.dim();
    if omega.dim() != n {
        return Err(Error::DimMismatch(omega.dim(), n));
    }
    let r = h.symmetry_residual_rank2();
    if r > 1e-12 * (1.0 + h.max_abs()) {
        return Err(Error::NotSymmetric(r));
    }
    let trace: f64 = (0..n).map(|i| h.get(&[i, i])).sum();
    let g = metric_tensor(n)?;
    let mut h0 = h.clone();
    h0.add_scaled(&g, -trace / n as f64)?;
    let conj = rank2_matmul(omega, &rank2_matmul(&h0, omega)?)?;
    let plus0 = h0.sub(&conj)?.scale(0.5);
    let minus = h0.add(&conj)?.scale(0.5);
    Ok(Sym2Split {
        trace,
        plus0,
        minus,
    })
}

// ---------------------------------------------------------------------------
// invariant subspaces as eigenspaces

fn operator_matrix_on_two_forms(
    dim: usize,
    apply: impl Fn(&DenseTensor) -> Result<DenseTensor>,
) -> Result<OperatorMatrix> {
    let basis = FormBasis::two_forms(dim)?;
    let m = basis.len();
    let mut entries = DMatrix::zeros(m, m);
    for col in 0..m {
        let image = apply(basis.element(col))?;
        for row in 0..m {
            entries[(row, col)] = basis.inner(&image, basis.element(row))?;
        }
    }
    OperatorMatrix::new(OperatorBasis::Ambient(basis), entries)
}

fn operator_matrix_on_sym2(
    dim: usize,
    apply: impl Fn(&DenseTensor) -> Result<DenseTensor>,
) -> Result<OperatorMatrix> {
    let basis = FormBasis::sym2(dim)?;
    let m = basis.len();
    let mut entries = DMatrix::zeros(m, m);
    for col in 0..m {
        let image = apply(basis.element(col))?;
        for row in 0..m {
            entries[(row, col)] = basis.inner(&image, basis.element(row))?;
        }
    }
    OperatorMatrix::new(OperatorBasis::Ambient(basis), entries)
}

fn eigenspace_subspace(
    op: &OperatorMatrix,
    target: f64,
    expected_dim: usize,
    label: SubspaceLabel,
    ambient: &FormBasis,
) -> Result<SubspaceBasis> {
    let spec = spectrum(op, CLUSTER_TOL)?;
    let vectors = spec.eigenspace(target, 1e-6);
    if vectors.ncols() != expected_dim {
        return Err(Error::EigenspaceDimension {
            value: target,
            expected: expected_dim,
            found: vectors.ncols(),
        });
    }
    SubspaceBasis::new(label, ambient.clone(), vectors)
}

/// The 1-, 6- and 8-dimensional invariant subspaces of 2-forms as
/// eigenspaces of the `P` map built from `⋆ω = ½ω²`.
pub fn two_form_subspaces_from_omega(
    omega: &DenseTensor,
) -> Result<(SubspaceBasis, SubspaceBasis, SubspaceBasis)> {
    let n = omega.dim();
    let star_omega = DenseTensor::from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        omega.get(&[i, j]) * omega.get(&[k, l])
            + omega.get(&[j, k]) * omega.get(&[i, l])
            + omega.get(&[l, j]) * omega.get(&[i, k])
    })?;
    let op = operator_matrix_on_two_forms(n, |beta| p_map_with(&star_omega, beta))?;
    let ambient = FormBasis::two_forms(n)?;
    let part1 = eigenspace_subspace(&op, 2.0, 1, SubspaceLabel::TwoForms1, &ambient)?;
    let part6 = eigenspace_subspace(&op, 1.0, 6, SubspaceLabel::TwoForms6, &ambient)?;
    let part8 = eigenspace_subspace(&op, -1.0, 8, SubspaceLabel::TwoForms8, &ambient)?;
    Ok((part1, part6, part8))
}

/// The commuting-traceless and anticommuting subspaces of symmetric
/// 2-tensors relative to `ω`.
pub fn sym2_subspaces_from_omega(
    omega: &DenseTensor,
) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let n = omega.dim();
    let projector = operator_matrix_on_sym2(n, |h| {
        let conj = rank2_matmul(omega, &rank2_matmul(h, omega)?)?;
        Ok(h.sub(&conj)?.scale(0.5))
    })?;
    let ambient = FormBasis::sym2(n)?;
    let spec = spectrum(&projector, CLUSTER_TOL)?;
    let plus = spec.eigenspace(1.0, 1e-6);
    let minus = spec.eigenspace(0.0, 1e-6);
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(
            "complex-structure split needs an even dimension".into(),
        ));
    }
    let expected_plus = (n / 2) * (n / 2);
    if plus.ncols() != expected_plus || minus.ncols() + plus.ncols() != n * (n + 1) / 2 {
        return Err(Error::EigenspaceDimension {
            value: 1.0,
            expected: expected_plus,
            found: plus.ncols(),
        });
    }
    // remove the metric direction from the commuting block
    let g = crate::operators::metric_unit_coordinates(n)?;
    let coeffs = nalgebra::DVector::from_iterator(plus.ncols(), (plus.transpose() * &g).iter().copied());
    if (coeffs.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(
            "metric direction does not lie in the commuting block".into(),
        ));
    }
    let comp = crate::operators::orthonormal_complement(&coeffs)?;
    let plus0 = &plus * comp;
    Ok((
        SubspaceBasis::new(SubspaceLabel::Sym2Plus0, ambient.clone(), plus0)?,
        SubspaceBasis::new(SubspaceLabel::Sym2Minus, ambient, minus)?,
    ))
}

/// The 7- and 14-dimensional invariant subspaces of 2-forms on the frame
/// of R^7, read off the dual 4-form.
pub fn g2_two_form_subspaces(psi: &DenseTensor) -> Result<(SubspaceBasis, SubspaceBasis)> {
    let n = psi.dim();
    let op = operator_matrix_on_two_forms(n, |beta| {
        DenseTensor::from_fn(n, 2, |idx| {
            let mut total = 0.0;
            for k in 0..n {
                for l in 0..n {
                    total += beta.get(&[k, l]) * psi.get(&[idx[0], idx[1], k, l]);
                }
            }
            total / 2.0
        })
    })?;
    let ambient = FormBasis::two_forms(n)?;
    let part7 = eigenspace_subspace(&op, -2.0, 7, SubspaceLabel::TwoForms7, &ambient)?;
    let part14 = eigenspace_subspace(&op, 1.0, 14, SubspaceLabel::TwoForms14, &ambient)?;
    Ok((part7, part14))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::diamond;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn random_2form(rng: &mut ChaCha8Rng, n: usize) -> DenseTensor {
        let mut beta = DenseTensor::zeros(n, 2).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-1.0..1.0);
                beta.set(&[i, j], v);
                beta.set(&[j, i], -v);
            }
        }
        beta
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> DenseTensor {
        let mut h = DenseTensor::zeros(n, 2).unwrap();
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                h.set(&[i, j], v);
                h.set(&[j, i], v);
            }
        }
        h
    }

    #[test]
    fn seven_dim_identity_suite_is_exact() {
        let model = G2Model::standard().unwrap();
        let rows = model.verify_identities();
        assert_eq!(rows.len(), 5);
        for row in rows {
            assert_eq!(row.residual, 0.0, "{} residual {}", row.label, row.residual);
        }
    }

    #[test]
    fn six_dim_identity_suite_is_exact() {
        let model = SU3Model::standard().unwrap();
        let rows = model.verify_identities();
        assert_eq!(rows.len(), 17);
        for (idx, row) in rows.iter().enumerate() {
            assert_eq!(row.label, format!("pi{}", idx + 1));
            assert_eq!(row.residual, 0.0, "{} residual {}", row.label, row.residual);
        }
    }

    #[test]
    fn corrupted_three_form_is_rejected() {
        let model = G2Model::standard().unwrap();
        let mut phi = model.phi().clone();
        phi.set(&[0, 1, 2], phi.get(&[0, 1, 2]) + 1e-3);
        assert!(G2Model::from_parts(phi, model.psi().clone()).is_err());
    }

    #[test]
    fn seven_dim_two_form_split_recomposes_and_is_idempotent() {
        let model = G2Model::standard().unwrap();
        let beta = random_2form(&mut rng(), 7);
        let split = model.project_2form(&beta).unwrap();
        let recomposed = split.part7.add(&split.part14).unwrap();
        assert!(recomposed.sub(&beta).unwrap().max_abs() < 1e-12);
        let again7 = model.project_2form(&split.part7).unwrap();
        assert!(again7.part14.max_abs() < 1e-12);
        let again14 = model.project_2form(&split.part14).unwrap();
        assert!(again14.part7.max_abs() < 1e-12);
        // eigenvector property under contraction with the 4-form
        for (part, expected) in [(&split.part7, -2.0), (&split.part14, 1.0)] {
            let image = DenseTensor::from_fn(7, 2, |idx| {
                let mut total = 0.0;
                for k in 0..7 {
                    for l in 0..7 {
                        total += part.get(&[k, l]) * model.psi().get(&[idx[0], idx[1], k, l]);
                    }
                }
                total / 2.0
            })
            .unwrap();
            assert!(image.sub(&part.scale(expected)).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn six_dim_two_form_split_matches_p_map_eigenvalues() {
        let model = SU3Model::standard().unwrap();
        let beta = random_2form(&mut rng(), 6);
        let split = model.project_2form(&beta).unwrap();
        let mut recomposed = model.omega().scale(split.lambda);
        recomposed.add_scaled(&split.part6, 1.0).unwrap();
        recomposed.add_scaled(&split.part8, 1.0).unwrap();
        assert!(recomposed.sub(&beta).unwrap().max_abs() < 1e-12);
        let pairs = [
            (model.omega().scale(split.lambda), 2.0),
            (split.part6.clone(), 1.0),
            (split.part8.clone(), -1.0),
        ];
        for (part, expected) in pairs {
            let image = model.p_map(&part).unwrap();
            assert!(image.sub(&part.scale(expected)).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn seven_dim_three_form_decode_round_trip() {
        let model = G2Model::standard().unwrap();
        let mut rng = rng();
        let g = metric_tensor(7).unwrap();
        let mut a = g.scale(rng.gen_range(-1.0..1.0));
        let sym = random_sym(&mut rng, 7);
        let tr: f64 = (0..7).map(|i| sym.get(&[i, i])).sum();
        a.add_scaled(&sym, 1.0).unwrap();
        a.add_scaled(&g, -tr / 7.0).unwrap();
        // skew part must lie in the 7-dimensional block to be recoverable
        let x: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let skew = DenseTensor::from_fn(7, 2, |idx| {
            (0..7)
                .map(|k| x[k] * model.phi().get(&[k, idx[0], idx[1]]))
                .sum()
        })
        .unwrap();
        a.add_scaled(&skew, 1.0).unwrap();
        let gamma = diamond(&a, model.phi()).unwrap();
        let decode = model.decode_3form(&gamma).unwrap();
        assert!(decode.tensor.sub(&a).unwrap().max_abs() < 1e-12);
        assert!(diamond(&decode.tensor, model.phi())
            .unwrap()
            .sub(&gamma)
            .unwrap()
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn six_dim_three_form_decode_round_trip() {
        let model = SU3Model::standard().unwrap();
        let mut rng = rng();
        let g = metric_tensor(6).unwrap();
        let mut h = g.scale(rng.gen_range(-1.0..1.0));
        h.add_scaled(model.omega(), rng.gen_range(-1.0..1.0)).unwrap();
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x_int = DenseTensor::from_fn(6, 2, |idx| {
            (0..6)
                .map(|k| x[k] * model.psi_plus().get(&[k, idx[0], idx[1]]))
                .sum()
        })
        .unwrap();
        h.add_scaled(&x_int, 1.0).unwrap();
        let split = model.sym2_split(&random_sym(&mut rng, 6)).unwrap();
        h.add_scaled(&split.minus, 1.0).unwrap();
        let gamma = diamond(&h, model.psi_plus()).unwrap();
        let decode = model.decode_3form(&gamma).unwrap();
        assert!(decode.tensor.sub(&h).unwrap().max_abs() < 1e-12);
        assert!(diamond(&decode.tensor, model.psi_plus())
            .unwrap()
            .sub(&gamma)
            .unwrap()
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn six_dim_four_form_decode_round_trip() {
        let model = SU3Model::standard().unwrap();
        let mut rng = rng();
        let g = metric_tensor(6).unwrap();
        let mut h = g.scale(rng.gen_range(-1.0..1.0));
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x_int = DenseTensor::from_fn(6, 2, |idx| {
            (0..6)
                .map(|k| x[k] * model.psi_plus().get(&[k, idx[0], idx[1]]))
                .sum()
        })
        .unwrap();
        h.add_scaled(&x_int, 1.0).unwrap();
        let split = model.sym2_split(&random_sym(&mut rng, 6)).unwrap();
        h.add_scaled(&split.plus0, 1.0).unwrap();
        let sigma = diamond(&h, model.star_omega()).unwrap();
        let decode = model.decode_4form(&sigma).unwrap();
        assert!(decode.tensor.sub(&h).unwrap().max_abs() < 1e-12);
        assert!(diamond(&decode.tensor, model.star_omega())
            .unwrap()
            .sub(&sigma)
            .unwrap()
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn six_dim_two_form_decode_of_invariant_form() {
        let model = SU3Model::standard().unwrap();
        let decode = model.decode_2form(model.omega()).unwrap();
        let g = metric_tensor(6).unwrap();
        assert!(decode.tensor.sub(&g.scale(0.5)).unwrap().max_abs() < 1e-12);
        assert!(decode.vector.max_abs() < 1e-12);
        assert!(decode.sym_part.max_abs() < 1e-12);
    }

    #[test]
    fn symmetric_split_reconstructs_and_commutes() {
        let model = SU3Model::standard().unwrap();
        let h = random_sym(&mut rng(), 6);
        let split = model.sym2_split(&h).unwrap();
        let g = metric_tensor(6).unwrap();
        let mut recomposed = g.scale(split.trace / 6.0);
        recomposed.add_scaled(&split.plus0, 1.0).unwrap();
        recomposed.add_scaled(&split.minus, 1.0).unwrap();
        assert!(recomposed.sub(&h).unwrap().max_abs() < 1e-12);
        let om = model.omega();
        let comm = rank2_matmul(om, &split.plus0)
            .unwrap()
            .sub(&rank2_matmul(&split.plus0, om).unwrap())
            .unwrap();
        assert!(comm.max_abs() < 1e-12);
        let anti = rank2_matmul(om, &split.minus)
            .unwrap()
            .add(&rank2_matmul(&split.minus, om).unwrap())
            .unwrap();
        assert!(anti.max_abs() < 1e-12);
    }

    #[test]
    fn invariant_subspaces_have_expected_dimensions() {
        let model = SU3Model::standard().unwrap();
        let (p1, p6, p8) = two_form_subspaces_from_omega(model.omega()).unwrap();
        assert_eq!(p1.subspace_dim(), 1);
        assert_eq!(p6.subspace_dim(), 6);
        assert_eq!(p8.subspace_dim(), 8);
        let (plus0, minus) = sym2_subspaces_from_omega(model.omega()).unwrap();
        assert_eq!(plus0.subspace_dim(), 8);
        assert_eq!(minus.subspace_dim(), 12);
        let g2 = G2Model::standard().unwrap();
        let (p7, p14) = g2_two_form_subspaces(g2.psi()).unwrap();
        assert_eq!(p7.subspace_dim(), 7);
        assert_eq!(p14.subspace_dim(), 14);
    }
}

//! Normal homogeneous model spaces given by Lie-algebra structure
//! constants over an adapted orthonormal basis, with curvature assembled
//! from the submersion formula and sectional sampling.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{EinsteinData, ManifoldKind};
use crate::error::Error;
use crate::operators::{hat_matrix, SubspaceBasis, SubspaceLabel};
use crate::tensor::{CurvatureTensor, DenseTensor};
use crate::Result;

const STRUCTURE_TOL: f64 = 1e-10;

/// Reductive homogeneous space `G/H` with a bi-invariant metric, stored
/// as structure constants over an orthonormal basis of the full Lie
/// algebra in which the tangent directions come first.
#[derive(Debug, Clone)]
pub struct SpaceModel {
    pub id: String,
    dim_m: usize,
    dim_h: usize,
    /// flattened `c[i][j][k]` with `[b_i, b_j] = Σ_k c[i][j][k] b_k`
    table: Vec<f64>,
}

impl SpaceModel {
    pub fn new(id: impl Into<String>, dim_m: usize, dim_h: usize, table: Vec<f64>) -> Result<Self> {
        let n = dim_m + dim_h;
        if table.len() != n * n * n {
            return Err(Error::InvalidStructureConstants(format!(
                "expected {} coefficients, got {}",
                n * n * n,
                table.len()
            )));
        }
        let model = SpaceModel {
            id: id.into(),
            dim_m,
            dim_h,
            table,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn dim_m(&self) -> usize {
        self.dim_m
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn total_dim(&self) -> usize {
        self.dim_m + self.dim_h
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.total_dim();
        self.table[(i * n + j) * n + k]
    }

    /// `[x, y]` in full-algebra coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.total_dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += x[i] * y[j] * self.coeff(i, j, k);
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.total_dim();
        // total antisymmetry of c_{ijk} encodes both the bracket
        // antisymmetry and the bi-invariance of the metric
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.coeff(i, j, k);
                    if (c + self.coeff(j, i, k)).abs() > STRUCTURE_TOL
                        || (c + self.coeff(i, k, j)).abs() > STRUCTURE_TOL
                    {
                        return Err(Error::InvalidStructureConstants(
                            "structure constants are not totally antisymmetric".into(),
                        ));
                    }
                }
            }
        }
        // Jacobi identity
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for q in 0..n {
                        let mut total = 0.0;
                        for p in 0..n {
                            total += self.coeff(i, j, p) * self.coeff(p, k, q)
                                + self.coeff(j, k, p) * self.coeff(p, i, q)
                                + self.coeff(k, i, p) * self.coeff(p, j, q);
                        }
                        if total.abs() > STRUCTURE_TOL {
                            return Err(Error::InvalidStructureConstants(format!(
                                "Jacobi identity fails with residual {total:e}"
                            )));
                        }
                    }
                }
            }
        }
        // the isotropy algebra must be a subalgebra; reductivity
        // `[h, m] ⊆ m` is then automatic from total antisymmetry
        for i in self.dim_m..n {
            for j in self.dim_m..n {
                for k in 0..self.dim_m {
                    if self.coeff(i, j, k).abs() > STRUCTURE_TOL {
                        return Err(Error::InvalidStructureConstants(
                            "isotropy directions do not close under the bracket".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn h_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.dim_m..self.total_dim()).map(|k| x[k] * y[k]).sum()
    }

    fn full_inner(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// Curvature tensor of the normal homogeneous metric on the tangent
    /// directions, from the Riemannian submersion formula.
    pub fn curvature(&self) -> Result<CurvatureTensor> {
        let m = self.dim_m;
        let n = self.total_dim();
        let mut frame_brackets = vec![vec![0.0; n]; m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..n {
                    frame_brackets[i * m + j][k] = self.coeff(i, j, k);
                }
            }
        }
        let tensor = DenseTensor::from_fn(m, 4, |idx| {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let xw = &frame_brackets[i * m + l];
            let yz = &frame_brackets[j * m + k];
            let xz = &frame_brackets[i * m + k];
            let yw = &frame_brackets[j * m + l];
            let zw = &frame_brackets[k * m + l];
            let xy = &frame_brackets[i * m + j];
            0.25 * (Self::full_inner(xw, yz) - Self::full_inner(xz, yw))
                + 0.25 * (self.h_inner(xw, yz) - self.h_inner(xz, yw))
                - 0.5 * self.h_inner(zw, xy)
        })?;
        let tol = 1e-9 * (1.0 + tensor.max_abs());
        CurvatureTensor::new(tensor, tol)
    }

    /// Sectional curvature of the plane spanned by two tangent vectors,
    /// directly from the bracket: `¼‖[X,Y]_m‖² + ‖[X,Y]_h‖²` after
    /// orthonormalization.
    pub fn plane_sectional(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let m = self.dim_m;
        if x.len() != m || y.len() != m {
            return Err(Error::DimMismatch(x.len().max(y.len()), m));
        }
        let gram = {
            let xx: f64 = x.iter().map(|v| v * v).sum();
            let yy: f64 = y.iter().map(|v| v * v).sum();
            let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            xx * yy - xy * xy
        };
        if gram <= 1e-12 {
            return Err(Error::DegeneratePlane(gram));
        }
        let n = self.total_dim();
        let mut xf = vec![0.0; n];
        let mut yf = vec![0.0; n];
        xf[..m].copy_from_slice(x);
        yf[..m].copy_from_slice(y);
        let b = self.bracket(&xf, &yf);
        let m_norm2: f64 = b[..m].iter().map(|v| v * v).sum();
        let h_norm2: f64 = b[m..].iter().map(|v| v * v).sum();
        Ok((0.25 * m_norm2 + h_norm2) / gram)
    }

    /// Random scan of sectional curvatures over Gaussian planes.
    pub fn sectional_scan(&self, samples: usize, seed: u64) -> Result<SectionalScan> {
        let r = self.curvature()?;
        let hat = hat_matrix(&r)?;
        let m = self.dim_m;
        let pairs: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min: Option<SectionalSample> = None;
        let mut max: Option<SectionalSample> = None;
        for _ in 0..samples {
            let x: Vec<f64> = (0..m).map(|_| gaussian(&mut rng)).collect();
            let y: Vec<f64> = (0..m).map(|_| gaussian(&mut rng)).collect();
            let mut b = DVector::zeros(pairs.len());
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                b[idx] = x[i] * y[j] - x[j] * y[i];
            }
            let norm2 = b.norm_squared();
            if norm2 <= 1e-12 {
                continue;
            }
            let value = -(b.dot(&(&hat.entries * &b))) / (2.0 * norm2);
            if min.as_ref().map_or(true, |s| value < s.value) {
                min = Some(SectionalSample {
                    value,
                    x: x.clone(),
                    y: y.clone(),
                });
            }
            if max.as_ref().map_or(true, |s| value > s.value) {
                max = Some(SectionalSample { value, x, y });
            }
        }
        match (min, max) {
            (Some(min), Some(max)) => Ok(SectionalScan { samples, min, max }),
            _ => Err(Error::InvalidParameter(
                "sectional scan needs at least one sample".into(),
            )),
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionalSample {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionalScan {
    pub samples: usize,
    pub min: SectionalSample,
    pub max: SectionalSample,
}

#[derive(Debug, Clone)]
pub struct WitnessPlane {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub expected: f64,
}

/// A built-in model space together with the geometric structure needed
/// for the vanishing criteria.
#[derive(Debug, Clone)]
pub struct BuiltinSpace {
    pub model: SpaceModel,
    pub kind: ManifoldKind,
    /// invariant almost-complex 2-form, present in the 6-dimensional case
    pub omega: Option<DenseTensor>,
    pub witnesses: Vec<WitnessPlane>,
}

pub const BUILTIN_IDS: [&str; 2] = ["aw-su3xsu2", "s3xs3"];

pub fn builtin(id: &str) -> Result<BuiltinSpace> {
    match id {
        "aw-su3xsu2" => su3xsu2_space(),
        "s3xs3" => s3xs3_space(),
        other => Err(Error::UnknownSpace(other.into())),
    }
}

impl BuiltinSpace {
    /// Einstein data read off the curvature, with the torsion scalar
    /// attached in the 7-dimensional case.
    pub fn einstein(&self, r: &CurvatureTensor) -> Result<EinsteinData> {
        let fitted = EinsteinData::from_curvature(r, 1e-8 * (1.0 + r.tensor().max_abs()))?;
        match self.kind {
            ManifoldKind::NearlyG2 => {
                let tau0 = -(8.0 * fitted.k / 3.0).sqrt();
                EinsteinData::new(7, fitted.k, Some(tau0))
            }
            ManifoldKind::NearlyKahler => Ok(fitted),
        }
    }

    /// The distinguished invariant 2-form subspaces: the 7-dimensional
    /// block is the eigenspace of the curvature action at `−k/3`, its
    /// complement is the 14-dimensional block; in the 6-dimensional case
    /// the blocks come from the invariant 2-form.
    pub fn two_form_blocks(
        &self,
        r: &CurvatureTensor,
        e: &EinsteinData,
    ) -> Result<(SubspaceBasis, SubspaceBasis)> {
        match self.kind {
            ManifoldKind::NearlyG2 => {
                let hat = hat_matrix(r)?;
                let spec = crate::operators::spectrum(&hat, crate::operators::CLUSTER_TOL)?;
                let target = -e.k / 3.0;
                let inside = spec.eigenspace(target, 1e-6);
                if inside.ncols() != 7 {
                    return Err(Error::EigenspaceDimension {
                        value: target,
                        expected: 7,
                        found: inside.ncols(),
                    });
                }
                let total = spec.eigenvectors.ncols();
                let mut outside = DMatrix::zeros(total, total - 7);
                let mut col = 0;
                for c in 0..total {
                    if (spec.raw[c] - target).abs() > 1e-6 {
                        outside.set_column(col, &spec.eigenvectors.column(c));
                        col += 1;
                    }
                }
                if col != 14 {
                    return Err(Error::EigenspaceDimension {
                        value: target,
                        expected: 14,
                        found: col,
                    });
                }
                let ambient = crate::operators::FormBasis::two_forms(7)?;
                Ok((
                    SubspaceBasis::new(SubspaceLabel::TwoForms7, ambient.clone(), inside)?,
                    SubspaceBasis::new(SubspaceLabel::TwoForms14, ambient, outside)?,
                ))
            }
            ManifoldKind::NearlyKahler => {
                let omega = self.omega.as_ref().ok_or_else(|| {
                    Error::SubspaceUnavailable("no invariant 2-form on this space".into())
                })?;
                let (p1, _p6, p8) = crate::structure::two_form_subspaces_from_omega(omega)?;
                Ok((p1, p8))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// builders

type M3 = Matrix3<Complex64>;
type M2 = Matrix2<Complex64>;

#[derive(Clone)]
struct Su3Su2(M3, M2);

impl Su3Su2 {
    fn bracket(&self, other: &Su3Su2) -> Su3Su2 {
        Su3Su2(
            self.0 * other.0 - other.0 * self.0,
            self.1 * other.1 - other.1 * self.1,
        )
    }

    fn inner(&self, other: &Su3Su2) -> f64 {
        let t3 = (self.0 * other.0).trace();
        let t2 = (self.1 * other.1).trace();
        let value = -(6.0 * t3 + 4.0 * t2) / 24.0;
        debug_assert!(value.im.abs() < 1e-12);
        value.re
    }
}

fn su2_basis() -> [M2; 3] {
    let i = Complex64::i();
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [
        M2::new(i, o, o, -i),
        M2::new(o, -one, one, o),
        M2::new(o, i, i, o),
    ]
}

fn embed_su2(a: &M2) -> M3 {
    let o = Complex64::new(0.0, 0.0);
    M3::new(a[(0, 0)], a[(0, 1)], o, a[(1, 0)], a[(1, 1)], o, o, o, o)
}

fn f1(a: &M2) -> Su3Su2 {
    Su3Su2(embed_su2(a), *a)
}

fn f2(a: &M2) -> Su3Su2 {
    Su3Su2(embed_su2(&(a * Complex64::new(2.0, 0.0))), a * Complex64::new(-3.0, 0.0))
}

fn g1(r: f64) -> Su3Su2 {
    let i = Complex64::i();
    let o = Complex64::new(0.0, 0.0);
    let ri = Complex64::new(r, 0.0) * i;
    Su3Su2(
        M3::new(ri, o, o, o, ri, o, o, o, -2.0 * ri),
        M2::zeros(),
    )
}

fn g2(z1: Complex64, z2: Complex64) -> Su3Su2 {
    let o = Complex64::new(0.0, 0.0);
    Su3Su2(
        M3::new(o, o, z1, o, o, z2, -z1.conj(), -z2.conj(), o),
        M2::zeros(),
    )
}

fn model_from_frame<T>(
    id: &str,
    dim_m: usize,
    frame: &[T],
    inner: impl Fn(&T, &T) -> f64,
    bracket: impl Fn(&T, &T) -> T,
) -> Result<SpaceModel> {
    let n = frame.len();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            let got = inner(&frame[i], &frame[j]);
            if (got - expected).abs() > 1e-12 {
                return Err(Error::InvalidStructureConstants(format!(
                    "frame is not orthonormal: <b{i}, b{j}> = {got}"
                )));
            }
        }
    }
    let mut table = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let b = bracket(&frame[i], &frame[j]);
            let mut norm2 = inner(&b, &b);
            for k in 0..n {
                let c = inner(&b, &frame[k]);
                table[(i * n + j) * n + k] = c;
                norm2 -= c * c;
            }
            if norm2.abs() > 1e-10 {
                return Err(Error::InvalidStructureConstants(format!(
                    "bracket of frame elements leaves the frame span, defect {norm2:e}"
                )));
            }
        }
    }
    SpaceModel::new(id, dim_m, n - dim_m, table)
}

/// The 7-dimensional homogeneous space `(SU(3)×SU(2))/(U(1)×SU(2))` with
/// its normal metric.
pub fn su3xsu2_space() -> Result<BuiltinSpace> {
    let su2 = su2_basis();
    let s5 = 5.0_f64.sqrt();
    let r2 = 2.0_f64.sqrt();
    let mut frame: Vec<Su3Su2> = Vec::new();
    for a in &su2 {
        frame.push(f2(&(a / Complex64::new(s5, 0.0))));
    }
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(r2, 0.0);
    let i = Complex64::new(0.0, r2);
    frame.push(g2(one, o));
    frame.push(g2(i, o));
    frame.push(g2(o, one));
    frame.push(g2(o, i));
    let s65 = (6.0 / 5.0_f64).sqrt();
    for a in &su2 {
        frame.push(f1(&(a * Complex64::new(s65, 0.0))));
    }
    frame.push(g1((2.0 / 3.0_f64).sqrt()));
    let model = model_from_frame(
        "aw-su3xsu2",
        7,
        &frame,
        Su3Su2::inner,
        Su3Su2::bracket,
    )?;
    let witnesses = vec![
        WitnessPlane {
            label: "max".into(),
            x: unit_vec(7, 3),
            y: unit_vec(7, 4),
            expected: 37.0 / 5.0,
        },
        WitnessPlane {
            label: "best_found_min".into(),
            x: unit_vec(7, 0),
            y: unit_vec(7, 6),
            expected: 1.0 / 5.0,
        },
    ];
    Ok(BuiltinSpace {
        model,
        kind: ManifoldKind::NearlyG2,
        omega: None,
        witnesses,
    })
}

fn unit_vec(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

/// Triples in `su(2)³ ≅ (ℝ³)³` with the diagonal as isotropy algebra.
#[derive(Clone, Copy)]
struct Triple([f64; 9]);

impl Triple {
    fn bracket(&self, other: &Triple) -> Triple {
        let s = 2.0_f64.sqrt();
        let mut out = [0.0; 9];
        for part in 0..3 {
            let a = &self.0[3 * part..3 * part + 3];
            let b = &other.0[3 * part..3 * part + 3];
            out[3 * part] = -s * (a[1] * b[2] - a[2] * b[1]);
            out[3 * part + 1] = -s * (a[2] * b[0] - a[0] * b[2]);
            out[3 * part + 2] = -s * (a[0] * b[1] - a[1] * b[0]);
        }
        Triple(out)
    }

    fn inner(&self, other: &Triple) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum::<f64>() / 3.0
    }
}

fn g_elem(b: [f64; 3], c: [f64; 3]) -> Triple {
    let mut out = [0.0; 9];
    out[..3].copy_from_slice(&b);
    out[3..6].copy_from_slice(&c);
    for k in 0..3 {
        out[6 + k] = -(b[k] + c[k]);
    }
    Triple(out)
}

/// The 6-dimensional homogeneous space `SU(2)³/SU(2)` with its normal
/// metric and invariant almost-complex structure.
pub fn s3xs3_space() -> Result<BuiltinSpace> {
    let half3 = 3.0_f64.sqrt() / 2.0 * 2.0_f64.sqrt(); // matrix scale × identification
    let mut frame: Vec<Triple> = Vec::new();
    for k in 0..3 {
        let mut b = [0.0; 3];
        b[k] = half3;
        frame.push(g_elem(b, [0.0; 3]));
    }
    let s2 = 2.0_f64.sqrt();
    for k in 0..3 {
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        b[k] = s2 / 2.0;
        c[k] = -s2;
        frame.push(g_elem(b, c));
    }
    for k in 0..3 {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        let mut out = [0.0; 9];
        for part in 0..3 {
            out[3 * part..3 * part + 3].copy_from_slice(&a);
        }
        frame.push(Triple(out));
    }
    let model = model_from_frame("s3xs3", 6, &frame, Triple::inner, Triple::bracket)?;
    // invariant almost-complex structure on the tangent directions
    let j = |t: &Triple| -> Triple {
        let r3 = 3.0_f64.sqrt();
        let mut out = [0.0; 9];
        for k in 0..3 {
            out[k] = 2.0 / r3 * t.0[3 + k] + t.0[k] / r3;
            out[3 + k] = 2.0 / r3 * t.0[6 + k] + t.0[3 + k] / r3;
            out[6 + k] = 2.0 / r3 * t.0[k] + t.0[6 + k] / r3;
        }
        Triple(out)
    };
    let omega = DenseTensor::from_fn(6, 2, |idx| Triple::inner(&j(&frame[idx[0]]), &frame[idx[1]]))?;
    let witnesses = vec![
        WitnessPlane {
            label: "max".into(),
            x: unit_vec(6, 0),
            y: unit_vec(6, 1),
            expected: 9.0 / 4.0,
        },
        WitnessPlane {
            label: "min".into(),
            x: unit_vec(6, 0),
            y: unit_vec(6, 3),
            expected: 0.0,
        },
    ];
    Ok(BuiltinSpace {
        model,
        kind: ManifoldKind::NearlyKahler,
        omega: Some(omega),
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// structure-constant import/export

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// Serialized description of a homogeneous space over an arbitrary basis:
/// sparse bracket coefficients, a symmetric positive metric, and the
/// indices of the basis vectors spanning the isotropy algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub dim: usize,
    pub h_indices: Vec<usize>,
    pub metric: Vec<Vec<f64>>,
    pub bracket: Vec<BracketTerm>,
}

impl SpaceSpec {
    /// Orthonormalizes the basis (isotropy directions first in the
    /// complement ordering) and builds the validated model.
    pub fn into_model(&self, id: impl Into<String>) -> Result<SpaceModel> {
        let n = self.dim;
        if self.metric.len() != n || self.metric.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidStructureConstants(
                "metric must be a square matrix of the stated dimension".into(),
            ));
        }
        let metric = DMatrix::from_fn(n, n, |r, c| self.metric[r][c]);
        if (&metric - metric.transpose()).abs().max() > 1e-10 {
            return Err(Error::InvalidStructureConstants(
                "metric must be symmetric".into(),
            ));
        }
        let mut raw = vec![0.0; n * n * n];
        let mut seen = std::collections::HashSet::new();
        for term in &self.bracket {
            if term.i >= n || term.j >= n || term.k >= n {
                return Err(Error::InvalidStructureConstants(format!(
                    "bracket term ({}, {}, {}) out of range",
                    term.i, term.j, term.k
                )));
            }
            if !seen.insert((term.i, term.j, term.k)) {
                return Err(Error::InvalidStructureConstants(format!(
                    "duplicate bracket term ({}, {}, {})",
                    term.i, term.j, term.k
                )));
            }
            raw[(term.i * n + term.j) * n + term.k] = term.c;
        }
        // fill by antisymmetry where only one orientation was listed
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let ij = raw[(i * n + j) * n + k];
                    let ji = raw[(j * n + i) * n + k];
                    if seen.contains(&(i, j, k)) && seen.contains(&(j, i, k)) {
                        if (ij + ji).abs() > 1e-12 {
                            return Err(Error::InvalidStructureConstants(format!(
                                "bracket terms ({i}, {j}, {k}) and ({j}, {i}, {k}) conflict"
                            )));
                        }
                    } else if seen.contains(&(i, j, k)) {
                        raw[(j * n + i) * n + k] = -ij;
                    } else if seen.contains(&(j, i, k)) {
                        raw[(i * n + j) * n + k] = -ji;
                    }
                }
            }
        }
        let mut h_flags = vec![false; n];
        for &h in &self.h_indices {
            if h >= n {
                return Err(Error::InvalidStructureConstants(format!(
                    "isotropy index {h} out of range"
                )));
            }
            h_flags[h] = true;
        }
        let dim_h = self.h_indices.len();
        let dim_m = n - dim_h;
        // Gram-Schmidt: isotropy directions first so the tangent frame
        // comes out orthogonal to the isotropy span, then reorder
        let mut ordered: Vec<DVector<f64>> = Vec::new();
        let h_then_m: Vec<usize> = (0..n)
            .filter(|i| h_flags[*i])
            .chain((0..n).filter(|i| !h_flags[*i]))
            .collect();
        for &idx in &h_then_m {
            let mut v = DVector::zeros(n);
            v[idx] = 1.0;
            for u in &ordered {
                let coeff = (u.transpose() * &metric * &v)[(0, 0)];
                v -= u * coeff;
            }
            let norm2 = (v.transpose() * &metric * &v)[(0, 0)];
            if norm2 <= 1e-12 {
                return Err(Error::InvalidStructureConstants(
                    "basis is degenerate with respect to the metric".into(),
                ));
            }
            ordered.push(v / norm2.sqrt());
        }
        // reorder: tangent block first
        let frame: Vec<DVector<f64>> = ordered[dim_h..]
            .iter()
            .chain(ordered[..dim_h].iter())
            .cloned()
            .collect();
        let raw_bracket = |x: &DVector<f64>, y: &DVector<f64>| -> DVector<f64> {
            let mut out = DVector::zeros(n);
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    if y[j] == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        out[k] += x[i] * y[j] * raw[(i * n + j) * n + k];
                    }
                }
            }
            out
        };
        let mut table = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let b = raw_bracket(&frame[i], &frame[j]);
                for k in 0..n {
                    table[(i * n + j) * n + k] = (frame[k].transpose() * &metric * &b)[(0, 0)];
                }
            }
        }
        SpaceModel::new(id, dim_m, dim_h, table)
    }
}

impl SpaceModel {
    /// Serialized form over the model's own orthonormal basis.
    pub fn to_spec(&self) -> SpaceSpec {
        let n = self.total_dim();
        let mut bracket = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.coeff(i, j, k);
                    if c != 0.0 {
                        bracket.push(BracketTerm { i, j, k, c });
                    }
                }
            }
        }
        let metric = (0..n)
            .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
            .collect();
        SpaceSpec {
            dim: n,
            h_indices: (self.dim_m..n).collect(),
            metric,
            bracket,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{weyl_hat_on, weyl_operators, weyl_ring_on};
    use crate::operators::{ring_matrix, spectrum, CLUSTER_TOL};
    use crate::structure::sym2_subspaces_from_omega;
    use approx::assert_abs_diff_eq;

    fn clusters_match(spec: &crate::operators::SpectrumReport, expected: &[(f64, usize)]) {
        assert_eq!(
            spec.eigenvalues.len(),
            expected.len(),
            "clusters {:?} vs {:?}",
            spec.eigenvalues,
            expected
        );
        for (cluster, (value, mult)) in spec.eigenvalues.iter().zip(expected) {
            assert_abs_diff_eq!(cluster.value, value, epsilon = 1e-9);
            assert_eq!(cluster.multiplicity, *mult);
        }
    }

    #[test]
    fn seven_dim_space_matches_reference_spectra() {
        let space = su3xsu2_space().unwrap();
        let r = space.model.curvature().unwrap();
        let e = space.einstein(&r).unwrap();
        assert_abs_diff_eq!(e.k, 54.0 / 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.tau0.unwrap(), -12.0 / 5.0_f64.sqrt(), epsilon = 1e-9);
        let hat = hat_matrix(&r).unwrap();
        let spec = spectrum(&hat, CLUSTER_TOL).unwrap();
        clusters_match(
            &spec,
            &[(-114.0 / 5.0, 1), (-66.0 / 5.0, 3), (-18.0 / 5.0, 7), (6.0 / 5.0, 10)],
        );
        let ring = ring_matrix(&r).unwrap();
        let spec = spectrum(&ring, CLUSTER_TOL).unwrap();
        clusters_match(
            &spec,
            &[
                (-54.0 / 5.0, 1),
                (-47.0 / 5.0, 1),
                (-23.0 / 5.0, 7),
                (13.0 / 5.0, 8),
                (5.0, 5),
                (37.0 / 5.0, 6),
            ],
        );
    }

    #[test]
    fn seven_dim_weyl_minima_and_witnesses() {
        let space = su3xsu2_space().unwrap();
        let r = space.model.curvature().unwrap();
        let e = space.einstein(&r).unwrap();
        let (block7, block14) = space.two_form_blocks(&r, &e).unwrap();
        assert_eq!(block7.subspace_dim(), 7);
        assert_eq!(block14.subspace_dim(), 14);
        let hat14 = weyl_hat_on(&r, &e, &block14).unwrap();
        assert_abs_diff_eq!(hat14.min_eigenvalue().unwrap(), -96.0 / 5.0, epsilon = 1e-9);
        let ops = weyl_operators(&r, &e).unwrap();
        assert_abs_diff_eq!(
            ops.ring_traceless.min_eigenvalue().unwrap(),
            -56.0 / 5.0,
            epsilon = 1e-9
        );
        for witness in &space.witnesses {
            let value = space.model.plane_sectional(&witness.x, &witness.y).unwrap();
            assert_abs_diff_eq!(value, witness.expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn six_dim_space_matches_reference_spectra() {
        let space = s3xs3_space().unwrap();
        let r = space.model.curvature().unwrap();
        let e = space.einstein(&r).unwrap();
        assert_abs_diff_eq!(e.k, 5.0, epsilon = 1e-9);
        let spec = spectrum(&hat_matrix(&r).unwrap(), CLUSTER_TOL).unwrap();
        clusters_match(&spec, &[(-7.0, 3), (-2.0, 7), (1.0, 5)]);
        let spec = spectrum(&ring_matrix(&r).unwrap(), CLUSTER_TOL).unwrap();
        clusters_match(
            &spec,
            &[(-5.0, 1), (-4.0, 2), (-1.5, 3), (2.0, 10), (2.5, 5)],
        );
    }

    #[test]
    fn six_dim_weyl_minima_and_witnesses() {
        let space = s3xs3_space().unwrap();
        let r = space.model.curvature().unwrap();
        let e = space.einstein(&r).unwrap();
        let (_p1, p8) = space.two_form_blocks(&r, &e).unwrap();
        assert_eq!(p8.subspace_dim(), 8);
        let hat8 = weyl_hat_on(&r, &e, &p8).unwrap();
        assert_abs_diff_eq!(hat8.min_eigenvalue().unwrap(), -5.0, epsilon = 1e-9);
        let omega = space.omega.as_ref().unwrap();
        let (plus0, minus) = sym2_subspaces_from_omega(omega).unwrap();
        let w_plus0 = weyl_ring_on(&r, &e, &plus0).unwrap();
        assert_abs_diff_eq!(w_plus0.min_eigenvalue().unwrap(), -2.5, epsilon = 1e-9);
        let w_minus = weyl_ring_on(&r, &e, &minus).unwrap();
        assert_abs_diff_eq!(w_minus.min_eigenvalue().unwrap(), -5.0, epsilon = 1e-9);
        for witness in &space.witnesses {
            let value = space.model.plane_sectional(&witness.x, &witness.y).unwrap();
            assert_abs_diff_eq!(value, witness.expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn sectional_scan_respects_known_bounds() {
        let space = s3xs3_space().unwrap();
        let scan = space.model.sectional_scan(2000, 0).unwrap();
        assert!(scan.min.value >= -1e-9);
        assert!(scan.max.value <= 9.0 / 4.0 + 1e-9);
        // re-evaluating the extremal planes through the bracket agrees
        let direct = space
            .model
            .plane_sectional(&scan.min.x, &scan.min.y)
            .unwrap();
        assert_abs_diff_eq!(direct, scan.min.value, epsilon = 1e-9);
    }

    #[test]
    fn spec_round_trip_preserves_curvature() {
        let space = s3xs3_space().unwrap();
        let spec = space.model.to_spec();
        let rebuilt = spec.into_model("round-trip").unwrap();
        assert_eq!(rebuilt.dim_m(), 6);
        let r1 = space.model.curvature().unwrap();
        let r2 = rebuilt.curvature().unwrap();
        assert!(r1.tensor().sub(r2.tensor()).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn import_rejects_broken_jacobi() {
        let space = s3xs3_space().unwrap();
        let mut spec = space.model.to_spec();
        spec.bracket[0].c += 0.5;
        assert!(spec.into_model("broken").is_err());
    }
}

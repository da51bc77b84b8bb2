//! Loading model spaces and resolving operator/subspace requests.

use curvlab_core::curvature::{
    weyl_hat_on, weyl_operators, weyl_ring_on, EinsteinData, ManifoldKind, SpectralMinima,
};
use curvlab_core::homogeneous::{builtin, BuiltinSpace, SpaceModel, SpaceSpec, BUILTIN_IDS};
use curvlab_core::operators::{
    hat_matrix, restrict, ring_matrix, sym2_traceless_subspace, BasisKind, OperatorMatrix,
    SubspaceBasis, SubspaceLabel, LEAK_TOL,
};
use curvlab_core::structure::{sym2_subspaces_from_omega, two_form_subspaces_from_omega};
use curvlab_core::tensor::CurvatureTensor;
use curvlab_core::{Error, Result};

pub enum LoadedSpace {
    Builtin(BuiltinSpace),
    Custom(SpaceModel),
}

impl LoadedSpace {
    pub fn model(&self) -> &SpaceModel {
        match self {
            LoadedSpace::Builtin(b) => &b.model,
            LoadedSpace::Custom(m) => m,
        }
    }

    pub fn builtin(&self) -> Option<&BuiltinSpace> {
        match self {
            LoadedSpace::Builtin(b) => Some(b),
            LoadedSpace::Custom(_) => None,
        }
    }
}

/// A built-in id, or a path to a JSON structure-constant file.
pub fn load_space(arg: &str) -> Result<LoadedSpace> {
    if BUILTIN_IDS.contains(&arg) {
        return Ok(LoadedSpace::Builtin(builtin(arg)?));
    }
    let path = std::path::Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let spec: SpaceSpec = serde_json::from_str(&text)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("custom");
        return Ok(LoadedSpace::Custom(spec.into_model(stem)?));
    }
    Err(Error::UnknownSpace(arg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hat,
    Ring,
    WeylHat,
    WeylRing,
}

impl OperatorKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rhat" => OperatorKind::Hat,
            "rring" => OperatorKind::Ring,
            "what" => OperatorKind::WeylHat,
            "wring" => OperatorKind::WeylRing,
            _ => return None,
        })
    }

    pub fn default_subspace(&self) -> &'static str {
        match self {
            OperatorKind::Hat | OperatorKind::WeylHat => "omega2_full",
            OperatorKind::Ring => "s2_full",
            OperatorKind::WeylRing => "s2_0",
        }
    }

    fn wants_two_forms(&self) -> bool {
        matches!(self, OperatorKind::Hat | OperatorKind::WeylHat)
    }
}

/// Resolves a subspace label for the given space; structure-dependent
/// blocks exist only on built-ins of the matching kind.
pub fn subspace_for(
    space: &LoadedSpace,
    r: &CurvatureTensor,
    e: &EinsteinData,
    label: SubspaceLabel,
) -> Result<SubspaceBasis> {
    let n = space.model().dim_m();
    match label {
        SubspaceLabel::TwoFormsFull => SubspaceBasis::full(BasisKind::TwoForms, n),
        SubspaceLabel::Sym2Full => SubspaceBasis::full(BasisKind::Sym2, n),
        SubspaceLabel::Sym2Traceless => sym2_traceless_subspace(n),
        SubspaceLabel::TwoForms7 | SubspaceLabel::TwoForms14 => {
            let b = require_kind(space, ManifoldKind::NearlyG2, label)?;
            let (block7, block14) = b.two_form_blocks(r, e)?;
            Ok(if label == SubspaceLabel::TwoForms7 {
                block7
            } else {
                block14
            })
        }
        SubspaceLabel::TwoForms1 | SubspaceLabel::TwoForms6 | SubspaceLabel::TwoForms8 => {
            let b = require_kind(space, ManifoldKind::NearlyKahler, label)?;
            let omega = b
                .omega
                .as_ref()
                .ok_or_else(|| Error::SubspaceUnavailable(label.as_str().into()))?;
            let (p1, p6, p8) = two_form_subspaces_from_omega(omega)?;
            Ok(match label {
                SubspaceLabel::TwoForms1 => p1,
                SubspaceLabel::TwoForms6 => p6,
                _ => p8,
            })
        }
        SubspaceLabel::Sym2Plus0 | SubspaceLabel::Sym2Minus => {
            let b = require_kind(space, ManifoldKind::NearlyKahler, label)?;
            let omega = b
                .omega
                .as_ref()
                .ok_or_else(|| Error::SubspaceUnavailable(label.as_str().into()))?;
            let (plus0, minus) = sym2_subspaces_from_omega(omega)?;
            Ok(if label == SubspaceLabel::Sym2Plus0 {
                plus0
            } else {
                minus
            })
        }
    }
}

fn require_kind<'a>(
    space: &'a LoadedSpace,
    kind: ManifoldKind,
    label: SubspaceLabel,
) -> Result<&'a BuiltinSpace> {
    match space.builtin() {
        Some(b) if b.kind == kind => Ok(b),
        _ => Err(Error::SubspaceUnavailable(label.as_str().into())),
    }
}

/// Operator matrix restricted to the requested subspace.
pub fn operator_on(
    op: OperatorKind,
    r: &CurvatureTensor,
    e: &EinsteinData,
    sub: &SubspaceBasis,
) -> Result<OperatorMatrix> {
    let two_forms = sub.ambient.kind() == BasisKind::TwoForms;
    if op.wants_two_forms() != two_forms {
        return Err(Error::InvalidParameter(format!(
            "operator and subspace {} act on different spaces",
            sub.label.as_str()
        )));
    }
    match op {
        OperatorKind::Hat => restrict(&hat_matrix(r)?, sub, LEAK_TOL),
        OperatorKind::Ring => restrict(&ring_matrix(r)?, sub, LEAK_TOL),
        OperatorKind::WeylHat => weyl_hat_on(r, e, sub),
        OperatorKind::WeylRing => {
            if sub.label == SubspaceLabel::Sym2Full {
                return Err(Error::InvalidParameter(
                    "the Weyl symmetric action is only defined on traceless blocks".into(),
                ));
            }
            weyl_ring_on(r, e, sub)
        }
    }
}

/// Einstein data for a loaded space, with the torsion scalar attached on
/// the 7-dimensional built-in.
pub fn einstein_for(space: &LoadedSpace, r: &CurvatureTensor) -> Result<EinsteinData> {
    match space.builtin() {
        Some(b) => b.einstein(r),
        None => EinsteinData::from_curvature(r, 1e-8 * (1.0 + r.tensor().max_abs())),
    }
}

/// Minimal Weyl eigenvalues on the blocks entering the vanishing criteria.
pub fn spectral_minima(
    b: &BuiltinSpace,
    r: &CurvatureTensor,
    e: &EinsteinData,
) -> Result<SpectralMinima> {
    let (_inside, distinguished) = b.two_form_blocks(r, e)?;
    let hat_distinguished = weyl_hat_on(r, e, &distinguished)?.min_eigenvalue()?;
    match b.kind {
        ManifoldKind::NearlyG2 => {
            let ops = weyl_operators(r, e)?;
            Ok(SpectralMinima {
                hat_distinguished,
                ring_traceless: Some(ops.ring_traceless.min_eigenvalue()?),
                ring_plus0: None,
                ring_minus: None,
            })
        }
        ManifoldKind::NearlyKahler => {
            let omega = b
                .omega
                .as_ref()
                .ok_or_else(|| Error::SubspaceUnavailable("s2_plus0".into()))?;
            let (plus0, minus) = sym2_subspaces_from_omega(omega)?;
            Ok(SpectralMinima {
                hat_distinguished,
                ring_traceless: None,
                ring_plus0: Some(weyl_ring_on(r, e, &plus0)?.min_eigenvalue()?),
                ring_minus: Some(weyl_ring_on(r, e, &minus)?.min_eigenvalue()?),
            })
        }
    }
}

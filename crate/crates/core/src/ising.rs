//! The Ising case `lambda_{x,y}(u,v) = J_{x,y} u v + u eta_x + v eta_y`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, PadicError, Result};
use crate::model::{
    check_family, default_path_window, measure_norm_profile, CompatibilityReport, LambdaSpec, LambdaTable,
    NormProfile, Normalization, Verdict,
};
use crate::padic::{Order, Padic};
use crate::recursion::{
    propagate_inward, solve_mobius_power, uniqueness_conditions, BoundaryField, MobiusFixedPoint,
    UniquenessCondition,
};
use crate::tree::{TreeAddress, TreeSlice};

#[derive(Clone, Debug, PartialEq)]
pub enum Coupling {
    Homogeneous(Padic),
    /// Keyed by the child endpoint of each edge.
    PerEdge(BTreeMap<TreeAddress, Padic>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExternalField {
    Homogeneous(Padic),
    /// Vertices not listed carry `eta_x = 0`.
    PerVertex(BTreeMap<TreeAddress, Padic>),
}

/// Couplings and external fields, each inside the `exp_p` domain.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingSpec {
    prime: u32,
    precision: u32,
    coupling: Coupling,
    field: ExternalField,
}

fn check_value(what: &str, at: Option<&TreeAddress>, value: &Padic, prime: u32) -> Result<()> {
    if value.prime() != prime {
        return Err(PadicError::PrimeMismatch(prime, value.prime()).into());
    }
    if !value.in_exp_domain() {
        let at = at.map(|a| format!(" at {a}")).unwrap_or_default();
        return Err(Error::Config(format!(
            "{what}{at} has order {} and is outside the exp_p domain",
            value.order()
        )));
    }
    Ok(())
}

impl IsingSpec {
    pub fn new(coupling: Coupling, field: ExternalField) -> Result<IsingSpec> {
        let mut values: Vec<(&str, Option<&TreeAddress>, &Padic)> = Vec::new();
        match &coupling {
            Coupling::Homogeneous(j) => values.push(("J", None, j)),
            Coupling::PerEdge(m) => values.extend(m.iter().map(|(a, j)| ("J", Some(a), j))),
        }
        match &field {
            ExternalField::Homogeneous(e) => values.push(("eta", None, e)),
            ExternalField::PerVertex(m) => values.extend(m.iter().map(|(a, e)| ("eta", Some(a), e))),
        }
        let first = values
            .first()
            .map(|v| v.2)
            .ok_or_else(|| Error::Config("Ising model needs at least one coupling".into()))?;
        let prime = first.prime();
        for (what, at, value) in &values {
            check_value(what, *at, value, prime)?;
        }
        if let Coupling::PerEdge(m) = &coupling {
            if m.is_empty() || m.contains_key(&TreeAddress::root()) {
                return Err(Error::Config("per-edge couplings are keyed by non-root child vertices".into()));
            }
        }
        let precision = values.iter().map(|v| v.2.precision()).min().unwrap_or(1);
        Ok(IsingSpec { prime, precision, coupling, field })
    }

    pub fn homogeneous(j: Padic, eta: Padic) -> Result<IsingSpec> {
        IsingSpec::new(Coupling::Homogeneous(j), ExternalField::Homogeneous(eta))
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn external_field(&self) -> &ExternalField {
        &self.field
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!((&self.coupling, &self.field), (Coupling::Homogeneous(_), ExternalField::Homogeneous(_)))
    }

    fn zero(&self) -> Padic {
        Padic::zero(self.prime as u64, self.precision).expect("prime validated")
    }

    pub fn coupling_at(&self, child: &TreeAddress) -> Result<Padic> {
        match &self.coupling {
            Coupling::Homogeneous(j) => Ok(j.clone()),
            Coupling::PerEdge(m) => m
                .get(child)
                .cloned()
                .ok_or_else(|| Error::Config(format!("no coupling for the edge ending at {child}"))),
        }
    }

    pub fn eta_at(&self, vertex: &TreeAddress) -> Padic {
        match &self.field {
            ExternalField::Homogeneous(e) => e.clone(),
            ExternalField::PerVertex(m) => m.get(vertex).cloned().unwrap_or_else(|| self.zero()),
        }
    }

    /// Whether every `eta_x` is zero to working precision.
    pub fn has_zero_field(&self) -> bool {
        match &self.field {
            ExternalField::Homogeneous(e) => e.is_negligible(),
            ExternalField::PerVertex(m) => m.values().all(Padic::is_negligible),
        }
    }

    fn couplings(&self) -> Vec<(Option<&TreeAddress>, &Padic)> {
        match &self.coupling {
            Coupling::Homogeneous(j) => vec![(None, j)],
            Coupling::PerEdge(m) => m.iter().map(|(a, j)| (Some(a), j)).collect(),
        }
    }
}

/// `lambda(u, v) = J u v + u eta_x + v eta_y` for the edge from `x` to its child `y`.
pub fn ising_lambda(spec: &IsingSpec, child: &TreeAddress) -> Result<LambdaTable> {
    let parent = child
        .parent()
        .ok_or_else(|| Error::Geometry("the root is not the child end of an edge".into()))?;
    let j = spec.coupling_at(child)?;
    Ok(table(&j, &spec.eta_at(&parent), &spec.eta_at(child)))
}

fn table(j: &Padic, eta_x: &Padic, eta_y: &Padic) -> LambdaTable {
    let minus_j = j.negated();
    LambdaTable::new(
        &(j + eta_x) + eta_y,
        &(&minus_j + eta_x) - eta_y,
        &(&minus_j - eta_x) + eta_y,
        &(j - eta_x) - eta_y,
    )
}

/// The interaction on `slice`: one table when `J` and `eta` are homogeneous, else one per edge.
pub fn lambda_spec(spec: &IsingSpec, slice: &TreeSlice) -> Result<LambdaSpec> {
    if let (Coupling::Homogeneous(j), ExternalField::Homogeneous(eta)) = (&spec.coupling, &spec.field) {
        return LambdaSpec::homogeneous(table(j, eta, eta));
    }
    let tables = slice
        .edges()
        .iter()
        .map(|e| {
            let child = slice.address(e.child);
            Ok((child.clone(), ising_lambda(spec, child)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    LambdaSpec::per_edge(tables)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingUniqueness {
    pub unique: Verdict,
    pub condition: UniquenessCondition,
    /// `min ord(4 J)` over couplings; the cross combination of an Ising table is `4J`.
    pub coupling_witness: Order,
    pub required_order: i64,
}

/// `p >= 3`: condition (i) follows from the domain bounds. `p = 2`: `|4J|_2 <= 2^-4`.
pub fn ising_uniqueness_check(spec: &IsingSpec) -> IsingUniqueness {
    let witness = spec
        .couplings()
        .into_iter()
        .map(|(_, j)| j.mul_int(4).order())
        .min_by_key(|o| o.lower_bound().unwrap_or(i64::MAX))
        .unwrap_or(Order::Infinite);
    if spec.prime == 2 {
        let ok = witness.at_least(4);
        let reason = if ok {
            format!("|4J|_2 has order {witness}, within 2^-4, so the cross-combination bound holds")
        } else {
            format!("|4J|_2 has order {witness}, outside 2^-4")
        };
        IsingUniqueness {
            unique: Verdict { value: ok, reason },
            condition: if ok { UniquenessCondition::ConditionII } else { UniquenessCondition::Neither },
            coupling_witness: witness,
            required_order: 4,
        }
    } else {
        IsingUniqueness {
            unique: Verdict {
                value: true,
                reason: format!("p = {} and every J, eta lies within 1/p, so all lambda entries do", spec.prime),
            },
            condition: UniquenessCondition::ConditionI,
            coupling_witness: witness,
            required_order: 1,
        }
    }
}

/// `f(x) = ((alpha x + 1) / (x + beta))^k` with `alpha = exp_p(2J + 2 eta)`, `beta = exp_p(2J - 2 eta)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingMap {
    pub alpha: Padic,
    pub beta: Padic,
    pub k: u32,
}

impl IsingMap {
    pub fn apply(&self, x: &Padic) -> Result<Padic, PadicError> {
        let one = self.alpha.integer_like(1);
        let ratio = (&(&self.alpha * x) + &one).try_div(&(x + &self.beta))?;
        Ok(ratio.pow(self.k))
    }
}

pub fn fixed_point_map(spec: &IsingSpec, k: u32) -> Result<IsingMap> {
    let (Coupling::Homogeneous(j), ExternalField::Homogeneous(eta)) = (&spec.coupling, &spec.field) else {
        return Err(Error::Config("the fixed-point map needs homogeneous J and eta".into()));
    };
    if k == 0 {
        return Err(Error::Geometry("tree order k must be at least 1".into()));
    }
    let alpha = (j + eta).mul_int(2).exp()?;
    let beta = (j - eta).mul_int(2).exp()?;
    Ok(IsingMap { alpha, beta, k })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingFixedPoint {
    pub map: IsingMap,
    pub zeta: Padic,
    /// `h* = 1/2 log_p zeta`.
    pub h_star: Padic,
    #[serde(flatten)]
    pub solve: MobiusFixedPoint,
}

/// The fixed point `zeta` of `f` near 1, by certified contraction from `x = 1` and
/// cross-checked against Newton lifting of `x (x + beta)^k - (alpha x + 1)^k`.
pub fn homogeneous_fixed_point(spec: &IsingSpec, k: u32) -> Result<IsingFixedPoint> {
    let map = fixed_point_map(spec, k)?;
    let uniqueness = ising_uniqueness_check(spec);
    if !uniqueness.unique.value {
        return Err(Error::Refused(uniqueness.unique.reason));
    }
    let one = map.alpha.integer_like(1);
    let solve = solve_mobius_power(&map.alpha, &one, &one, &map.beta, k).map_err(|e| match e {
        Error::Padic(PadicError::ContractionViolation { .. }) => {
            Error::Internal(format!("Ising map failed to contract: {e}"))
        }
        other => other,
    })?;
    let zeta = solve.z.clone();
    let h_star = zeta.log()?.half();
    Ok(IsingFixedPoint { map, zeta, h_star, solve })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingReport {
    pub prime: u32,
    pub precision: u32,
    pub k: u32,
    pub depth: usize,
    pub homogeneous: bool,
    pub unique: Verdict,
    pub bounded: Verdict,
    pub uniqueness: IsingUniqueness,
    pub zeta: Option<Padic>,
    pub h_star: Option<Padic>,
    pub fixed_point: Option<IsingFixedPoint>,
    /// How the boundary field family was obtained.
    pub field_source: String,
    pub field: BoundaryField,
    pub compatible: bool,
    pub compatibility: Vec<CompatibilityReport>,
    pub profile: NormProfile,
}

/// Build lambda, check uniqueness, find the boundary field family, then run the
/// compatibility and norm checks on every finite volume up to `depth`.
pub fn ising_gibbs_report(
    spec: &IsingSpec,
    k: u32,
    depth: usize,
    windows: usize,
    normalization: Normalization,
) -> Result<IsingReport> {
    let slice = TreeSlice::build(k, depth)?;
    let lambda = lambda_spec(spec, &slice)?;
    let uniqueness = ising_uniqueness_check(spec);
    let general = uniqueness_conditions(&lambda);
    if uniqueness.unique.value != general.holds() {
        return Err(Error::Internal(format!(
            "Ising verdict ({}) disagrees with the lambda-model verdict ({})",
            uniqueness.unique.reason, general.reason
        )));
    }
    let (fixed_point, mut field, field_source, extend_with) = if spec.is_homogeneous() {
        let fp = homogeneous_fixed_point(spec, k)?;
        let seed = slice.level(depth).iter().map(|a| (a.clone(), fp.h_star.clone())).collect();
        let field = propagate_inward(&seed, &lambda, &slice)?;
        let h = fp.h_star.clone();
        (Some(fp), field, "propagated inward from the constant h* on the boundary".to_string(), Some(h))
    } else if spec.has_zero_field() {
        let field = BoundaryField::zero(&slice, spec.prime, spec.precision)?;
        (None, field, "h = 0, which solves the recursion when eta = 0".to_string(), None)
    } else {
        let seed = slice.level(depth).iter().map(|a| (a.clone(), spec.zero())).collect();
        let field = propagate_inward(&seed, &lambda, &slice)?;
        (None, field, "propagated inward from a zero boundary seed".to_string(), None)
    };

    // along the default path beyond the slice a translation-invariant family stays at h*
    let windows = match &extend_with {
        Some(h) => {
            for a in default_path_window(windows) {
                if a.depth() > depth {
                    field.insert(a, h.clone())?;
                }
            }
            windows
        }
        None => windows.min(depth),
    };
    if windows == 0 {
        return Err(Error::Config("the marginal sweep needs at least one window".into()));
    }
    let compatibility = check_family(&lambda, &field, &slice)?;
    let compatible = compatibility.iter().all(|r| r.passed);
    let profile = measure_norm_profile(&lambda, &field, &slice, depth, windows, normalization)?;
    let bounded = profile.bounded.clone();
    Ok(IsingReport {
        prime: spec.prime,
        precision: spec.precision,
        k,
        depth,
        homogeneous: spec.is_homogeneous(),
        unique: uniqueness.unique.clone(),
        bounded,
        uniqueness,
        zeta: fixed_point.as_ref().map(|f| f.zeta.clone()),
        h_star: fixed_point.as_ref().map(|f| f.h_star.clone()),
        fixed_point,
        field_source,
        field,
        compatible,
        compatibility,
        profile,
    })
}

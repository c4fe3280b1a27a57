use serde::{Deserialize, Serialize};

use super::lambda::{LambdaSpec, LambdaTable, Spin};
use crate::error::{Error, PadicError, Result};
use crate::padic::Padic;
use crate::recursion::BoundaryField;
use crate::tree::TreeAddress;

/// How the transition weights along an edge are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Each row sums to 1.
    #[default]
    Row,
    /// All four entries share one denominator and sum to 1.
    Literal,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Normalization> {
        match s {
            "row" => Ok(Normalization::Row),
            "literal" => Ok(Normalization::Literal),
            other => Err(Error::Config(format!("normalization {other:?} is not 'row' or 'literal'"))),
        }
    }
}

/// `P_{u,v} ~ exp_p(lambda_{x,y}(u,v) + u h_x + v h_y)` for one oriented edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionMatrix {
    pub from: TreeAddress,
    pub to: TreeAddress,
    pub normalization: Normalization,
    #[serde(rename = "++")]
    pp: Padic,
    #[serde(rename = "+-")]
    pm: Padic,
    #[serde(rename = "-+")]
    mp: Padic,
    #[serde(rename = "--")]
    mm: Padic,
}

impl TransitionMatrix {
    pub fn get(&self, u: Spin, v: Spin) -> &Padic {
        match (u, v) {
            (Spin::Up, Spin::Up) => &self.pp,
            (Spin::Up, Spin::Down) => &self.pm,
            (Spin::Down, Spin::Up) => &self.mp,
            (Spin::Down, Spin::Down) => &self.mm,
        }
    }

    pub fn entries(&self) -> [&Padic; 4] {
        [&self.pp, &self.pm, &self.mp, &self.mm]
    }

    pub fn row_sum(&self, u: Spin) -> Padic {
        self.get(u, Spin::Up) + self.get(u, Spin::Down)
    }
}

/// The table of an edge read from `from` to `to`; the tree edge must join them.
pub fn oriented_table(lambda: &LambdaSpec, from: &TreeAddress, to: &TreeAddress) -> Result<LambdaTable> {
    if to.parent().as_ref() == Some(from) {
        Ok(lambda.table_for(to)?.clone())
    } else if from.parent().as_ref() == Some(to) {
        Ok(lambda.table_for(from)?.transposed())
    } else {
        Err(Error::Geometry(format!("{from} and {to} are not adjacent")))
    }
}

pub fn transition_matrix(
    from: &TreeAddress,
    to: &TreeAddress,
    lambda: &LambdaSpec,
    field: &BoundaryField,
    normalization: Normalization,
) -> Result<TransitionMatrix> {
    let table = oriented_table(lambda, from, to)?;
    let lookup = |a: &TreeAddress| {
        field.value(a).ok_or_else(|| Error::Config(format!("field has no value at {a}")))
    };
    let (hx, hy) = (lookup(from)?, lookup(to)?);
    let signed = |s: Spin, h: &Padic| if s == Spin::Up { h.clone() } else { h.negated() };
    let raw = |u: Spin, v: Spin| -> Result<Padic, PadicError> {
        (&(table.get(u, v) + &signed(u, hx)) + &signed(v, hy)).exp()
    };
    let at = |source| Error::AtVertex { vertex: from.clone(), source };
    let w = [
        raw(Spin::Up, Spin::Up).map_err(at)?,
        raw(Spin::Up, Spin::Down).map_err(at)?,
        raw(Spin::Down, Spin::Up).map_err(at)?,
        raw(Spin::Down, Spin::Down).map_err(at)?,
    ];
    let divide = |x: &Padic, d: &Padic| x.try_div(d).map_err(at);
    let [pp, pm, mp, mm] = match normalization {
        Normalization::Row => {
            let top = &w[0] + &w[1];
            let bottom = &w[2] + &w[3];
            [divide(&w[0], &top)?, divide(&w[1], &top)?, divide(&w[2], &bottom)?, divide(&w[3], &bottom)?]
        }
        Normalization::Literal => {
            let total = &(&(&w[0] + &w[1]) + &w[2]) + &w[3];
            [divide(&w[0], &total)?, divide(&w[1], &total)?, divide(&w[2], &total)?, divide(&w[3], &total)?]
        }
    };
    Ok(TransitionMatrix { from: from.clone(), to: to.clone(), normalization, pp, pm, mp, mm })
}

/// `pi ~ (P_{-+}, P_{+-})`, normalized to sum 1; left-invariant when rows sum to 1.
pub fn stationary_vector(matrix: &TransitionMatrix) -> Result<(Padic, Padic)> {
    let to_up = matrix.get(Spin::Down, Spin::Up);
    let to_down = matrix.get(Spin::Up, Spin::Down);
    let total = to_up + to_down;
    Ok((to_up.try_div(&total)?, to_down.try_div(&total)?))
}

/// `x_{-n} .. x_n` through the root: `x_{-m} = /1/1..1` (m ones) and `x_m = /2/1..1`.
pub fn default_path_window(n: usize) -> Vec<TreeAddress> {
    let left = (1..=n).rev().map(|m| TreeAddress::from_path(vec![1; m]));
    let right = (1..=n).map(|m| {
        let mut path = vec![1; m];
        path[0] = 2;
        TreeAddress::from_path(path)
    });
    left.chain(std::iter::once(TreeAddress::root())).chain(right).collect()
}

/// The transition matrices along consecutive window vertices.
pub fn path_matrices(
    window: &[TreeAddress],
    lambda: &LambdaSpec,
    field: &BoundaryField,
    normalization: Normalization,
) -> Result<Vec<TransitionMatrix>> {
    if window.len() < 2 {
        return Err(Error::Geometry("a path window needs at least two vertices".into()));
    }
    window
        .windows(2)
        .map(|pair| transition_matrix(&pair[0], &pair[1], lambda, field, normalization))
        .collect()
}

/// `mu_pi(omega) = pi_{omega(x_{-n})} prod_m P^{x_m, x_{m+1}}_{omega(x_m) omega(x_{m+1})}`,
/// with `pi` the stationary vector of the first edge's matrix.
pub fn marginal_path_measure(
    window: &[TreeAddress],
    omega: &[Spin],
    lambda: &LambdaSpec,
    field: &BoundaryField,
    normalization: Normalization,
) -> Result<Padic> {
    let matrices = path_matrices(window, lambda, field, normalization)?;
    marginal_from_matrices(&matrices, omega)
}

pub(crate) fn marginal_from_matrices(matrices: &[TransitionMatrix], omega: &[Spin]) -> Result<Padic> {
    if omega.len() != matrices.len() + 1 {
        return Err(Error::Config(format!(
            "omega has {} spins for a window of {} vertices",
            omega.len(),
            matrices.len() + 1
        )));
    }
    let (up, down) = stationary_vector(&matrices[0])?;
    let mut acc = if omega[0] == Spin::Up { up } else { down };
    for (m, pair) in matrices.iter().zip(omega.windows(2)) {
        acc = &acc * m.get(pair[0], pair[1]);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::NormValue;

    fn q(n: i64, d: i64, p: u64) -> Padic {
        Padic::from_rational(n, d, p, 24).unwrap()
    }

    fn zero_model(p: u64) -> LambdaSpec {
        let z = q(0, 1, p);
        LambdaSpec::homogeneous(LambdaTable::new(z.clone(), z.clone(), z.clone(), z)).unwrap()
    }

    fn constant_field(window: &[TreeAddress], h: &Padic) -> BoundaryField {
        BoundaryField::from_values(h.prime(), window.iter().map(|a| (a.clone(), h.clone()))).unwrap()
    }

    #[test]
    fn default_window_shape() {
        let w = default_path_window(2);
        let text: Vec<String> = w.iter().map(|a| a.to_string()).collect();
        assert_eq!(text, ["/1/1", "/1", "/", "/2", "/2/1"]);
        assert!(w.windows(2).all(|p| p[0].is_adjacent(&p[1])));
    }

    #[test]
    fn zero_model_matrices_are_halves() {
        let w = default_path_window(1);
        let field = constant_field(&w, &q(0, 1, 3));
        let m = transition_matrix(&w[0], &w[1], &zero_model(3), &field, Normalization::Row).unwrap();
        assert!(m.entries().iter().all(|e| e.agrees_with(&q(1, 2, 3))));
        let (a, b) = stationary_vector(&m).unwrap();
        assert!(a.agrees_with(&q(1, 2, 3)) && b.agrees_with(&q(1, 2, 3)));
        let mu = marginal_path_measure(&w, &[Spin::Up, Spin::Down, Spin::Up], &zero_model(3), &field, Normalization::Row)
            .unwrap();
        assert!(mu.agrees_with(&q(1, 8, 3)));
    }

    #[test]
    fn stationary_vector_is_invariant() {
        let t = LambdaTable::new(q(3, 1, 3), q(-3, 1, 3), q(-3, 1, 3), q(3, 1, 3));
        let lambda = LambdaSpec::homogeneous(t).unwrap();
        let w = default_path_window(1);
        let field = BoundaryField::from_values(3, [
            (w[0].clone(), q(9, 1, 3)),
            (w[1].clone(), q(-3, 1, 3)),
            (w[2].clone(), q(6, 1, 3)),
        ])
        .unwrap();
        let m = transition_matrix(&w[0], &w[1], &lambda, &field, Normalization::Row).unwrap();
        for u in Spin::ALL {
            assert!(m.row_sum(u).agrees_with(&q(1, 1, 3)));
        }
        let (a, b) = stationary_vector(&m).unwrap();
        for v in Spin::ALL {
            let image = &(&a * m.get(Spin::Up, v)) + &(&b * m.get(Spin::Down, v));
            let target = if v == Spin::Up { &a } else { &b };
            assert!(image.agrees_with(target));
        }
    }

    #[test]
    fn literal_entries_grow_for_two() {
        let lambda = zero_model(2);
        let w = default_path_window(1);
        let field = constant_field(&w, &q(0, 1, 2));
        let m = transition_matrix(&w[1], &w[2], &lambda, &field, Normalization::Literal).unwrap();
        for e in m.entries() {
            assert_eq!(e.norm().unwrap(), NormValue::Power(2));
        }
    }

    #[test]
    fn rejects_non_adjacent_window() {
        let w: Vec<TreeAddress> = vec!["/1".parse().unwrap(), "/2".parse().unwrap()];
        let field = constant_field(&w, &q(0, 1, 3));
        let err = marginal_path_measure(&w, &[Spin::Up, Spin::Up], &zero_model(3), &field, Normalization::Row);
        assert!(matches!(err, Err(Error::Geometry(_))));
    }
}

//! Parameter planning: which `(S, A, T)` a worker pool supports, how many
//! returns the master must wait for, and where the interpolation points go.

use alloc::vec::Vec;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("parameters are infeasible: {0}")]
    Infeasible(RegionCheck),
    #[error("field has {order} elements but the scheme needs at least {needed}")]
    FieldTooSmall { order: u64, needed: u64 },
    #[error("invalid parameters: {0}")]
    Invalid(&'static str),
    #[error("evaluation points violate: {0}")]
    BadPoints(&'static str),
}

/// Which construction realises a parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Variant {
    Lagrange,
    UncodedRepetition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Feasibility {
    Infeasible,
    Lagrange,
    UncodedRepetition,
}

impl Feasibility {
    pub fn variant(self) -> Option<Variant> {
        match self {
            Self::Infeasible => None,
            Self::Lagrange => Some(Variant::Lagrange),
            Self::UncodedRepetition => Some(Variant::UncodedRepetition),
        }
    }
}

/// Both sides of both region inequalities, evaluated.
///
/// - Lagrange: `(K + T - 1) * deg + S + 2A + 1 <= N`
/// - uncoded repetition: `K * (S + 2A + deg * T + 1) <= N`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionCheck {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub deg: usize,
    pub lagrange_need: usize,
    pub repetition_need: usize,
}

impl RegionCheck {
    pub fn new(n: usize, k: usize, s: usize, a: usize, t: usize, deg: usize) -> Self {
        Self {
            n,
            k,
            s,
            a,
            t,
            deg,
            lagrange_need: (k + t).saturating_sub(1) * deg + s + 2 * a + 1,
            repetition_need: k * (s + 2 * a + deg * t + 1),
        }
    }

    pub fn lagrange_ok(&self) -> bool {
        self.k >= 1 && self.deg >= 1 && self.lagrange_need <= self.n
    }

    pub fn repetition_ok(&self) -> bool {
        self.k >= 1 && self.deg >= 1 && self.repetition_need <= self.n
    }

    pub fn verdict(&self) -> Feasibility {
        if self.lagrange_ok() {
            Feasibility::Lagrange
        } else if self.repetition_ok() {
            Feasibility::UncodedRepetition
        } else {
            Feasibility::Infeasible
        }
    }

    /// `(K+T-1)·deg+S+2A+1 = <need>`, with the inputs spelled out.
    pub fn lagrange_expr(&self) -> alloc::string::String {
        alloc::format!(
            "({}+{}−1)·{}+{}+{}+1 = {}",
            self.k,
            self.t,
            self.deg,
            self.s,
            2 * self.a,
            self.lagrange_need
        )
    }

    /// `K·(S+2A+deg·T+1) = <need>`, with the inputs spelled out.
    pub fn repetition_expr(&self) -> alloc::string::String {
        alloc::format!(
            "{}·({}+{}+{}+1)={}",
            self.k,
            self.s,
            2 * self.a,
            self.deg * self.t,
            self.repetition_need
        )
    }
}

impl core::fmt::Display for RegionCheck {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "lagrange needs {} workers, uncoded repetition needs {}, have {}",
            self.lagrange_need, self.repetition_need, self.n
        )
    }
}

/// Which construction (if any) supports `(S, A, T)` with `N` workers, `K`
/// blocks and a degree-`deg` function. Lagrange wins ties.
pub fn feasible(n: usize, k: usize, s: usize, a: usize, t: usize, deg: usize) -> Feasibility {
    RegionCheck::new(n, k, s, a, t, deg).verdict()
}

/// Number of returns that always suffices:
/// `min((K-1)·deg + 1, N - floor(N/K) + 1) + T·deg`.
pub fn recovery_threshold(n: usize, k: usize, deg: usize, t: usize) -> Result<usize, SchemeError> {
    if k == 0 || deg == 0 {
        return Err(SchemeError::Invalid("K and deg must be positive"));
    }
    let check = RegionCheck::new(n, k, 0, 0, t, deg);
    if check.verdict() == Feasibility::Infeasible {
        return Err(SchemeError::Infeasible(check));
    }
    let coded = (k - 1) * deg + 1;
    let repeated = n - n / k + 1;
    Ok(coded.min(repeated) + t * deg)
}

/// `ceil(n / r)`: no scheme storing `r` of `n` sub-matrices per worker can
/// decode the regression gradient from fewer workers.
pub fn regression_lower_bound(n: usize, r: usize) -> usize {
    assert!(r >= 1 && r <= n, "need 1 <= r <= n");
    n.div_ceil(r)
}

/// The gradient-descent threshold `2·ceil(n/r) - 1`.
pub fn regression_threshold(n: usize, r: usize) -> usize {
    2 * regression_lower_bound(n, r) - 1
}

/// A fully specified coding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SchemeParams {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub deg: usize,
    pub variant: Variant,
}

impl SchemeParams {
    /// Picks the variant the way [`feasible`] does.
    pub fn plan(n: usize, k: usize, s: usize, a: usize, t: usize, deg: usize) -> Result<Self, SchemeError> {
        if n == 0 || k == 0 || deg == 0 {
            return Err(SchemeError::Invalid("N, K and deg must be positive"));
        }
        let check = RegionCheck::new(n, k, s, a, t, deg);
        let variant = check.verdict().variant().ok_or(SchemeError::Infeasible(check))?;
        Ok(Self { n, k, s, a, t, deg, variant })
    }

    /// Forces a variant, checking that its own region admits the tuple.
    pub fn with_variant(
        n: usize,
        k: usize,
        s: usize,
        a: usize,
        t: usize,
        deg: usize,
        variant: Variant,
    ) -> Result<Self, SchemeError> {
        if n == 0 || k == 0 || deg == 0 {
            return Err(SchemeError::Invalid("N, K and deg must be positive"));
        }
        let check = RegionCheck::new(n, k, s, a, t, deg);
        let ok = match variant {
            Variant::Lagrange => check.lagrange_ok(),
            Variant::UncodedRepetition => check.repetition_ok() && t == 0,
        };
        if !ok {
            return Err(SchemeError::Infeasible(check));
        }
        Ok(Self { n, k, s, a, t, deg, variant })
    }

    pub fn region(&self) -> RegionCheck {
        RegionCheck::new(self.n, self.k, self.s, self.a, self.t, self.deg)
    }

    /// Degree bound of the composition `f(u(z))`.
    pub fn composition_degree(&self) -> usize {
        self.deg * (self.k + self.t - 1)
    }

    /// Returns needed to decode under the full adversary budget:
    /// `deg·(K+T-1) + 2A + 1`.
    pub fn decode_budget(&self) -> usize {
        self.composition_degree() + 2 * self.a + 1
    }

    /// Smallest prime-field order that fits the canonical points.
    pub fn min_field_order(&self) -> u64 {
        (self.n + self.k + self.t) as u64
    }
}

/// Interpolation points `beta_1..beta_{K+T}` and worker points
/// `alpha_1..alpha_N`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalPoints<E> {
    k: usize,
    betas: Vec<E>,
    alphas: Vec<E>,
    /// For the repetition layout, the block each worker replicates.
    replica_of: Option<Vec<usize>>,
}

impl<E: Copy + PartialEq> EvalPoints<E> {
    /// Arbitrary points for the Lagrange construction. `betas` holds `K + T`
    /// entries; when `T > 0` no alpha may coincide with a data beta.
    pub fn new(k: usize, betas: Vec<E>, alphas: Vec<E>) -> Result<Self, SchemeError> {
        if k == 0 || betas.len() < k {
            return Err(SchemeError::BadPoints("need at least K betas"));
        }
        if !all_distinct(&betas) {
            return Err(SchemeError::BadPoints("betas must be distinct"));
        }
        if !all_distinct(&alphas) {
            return Err(SchemeError::BadPoints("alphas must be distinct"));
        }
        if betas.len() > k && alphas.iter().any(|a| betas[..k].contains(a)) {
            return Err(SchemeError::BadPoints("alphas must avoid the data betas when T > 0"));
        }
        Ok(Self { k, betas, alphas, replica_of: None })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.betas.len() - self.k
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn betas(&self) -> &[E] {
        &self.betas
    }

    pub fn data_betas(&self) -> &[E] {
        &self.betas[..self.k]
    }

    pub fn alphas(&self) -> &[E] {
        &self.alphas
    }

    pub fn replica_of(&self) -> Option<&[usize]> {
        self.replica_of.as_deref()
    }

    pub fn variant(&self) -> Variant {
        if self.replica_of.is_some() {
            Variant::UncodedRepetition
        } else {
            Variant::Lagrange
        }
    }
}

fn all_distinct<E: PartialEq>(v: &[E]) -> bool {
    v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| b != a))
}

/// Canonical points: betas `1..=K+T`, alphas `K+T+1..=K+T+N` (reduced mod
/// p) for Lagrange; for repetition, betas `1..=K` and worker `j` sits on
/// `beta_{j mod K}`.
pub fn make_eval_points<F: Field>(
    field: &F,
    params: &SchemeParams,
) -> Result<EvalPoints<F::Elem>, SchemeError> {
    let needed = params.min_field_order();
    if let Some(order) = field.order() {
        if order < needed {
            return Err(SchemeError::FieldTooSmall { order, needed });
        }
    }
    match params.variant {
        Variant::Lagrange => {
            let m = (params.k + params.t) as u64;
            let betas = (1..=m).map(|v| field.from_u64(v)).collect();
            let alphas = (m + 1..=m + params.n as u64).map(|v| field.from_u64(v)).collect();
            EvalPoints::new(params.k, betas, alphas)
        }
        Variant::UncodedRepetition => {
            if params.t != 0 {
                return Err(SchemeError::Invalid("the repetition layout carries no padding"));
            }
            let betas: Vec<_> = (1..=params.k as u64).map(|v| field.from_u64(v)).collect();
            let replica_of: Vec<usize> = (0..params.n).map(|j| j % params.k).collect();
            let alphas = replica_of.iter().map(|&i| betas[i]).collect();
            Ok(EvalPoints { k: params.k, betas, alphas, replica_of: Some(replica_of) })
        }
    }
}

/// The regression placement: betas `1..=K`, alphas `0..N-1`. Alphas may hit
/// betas since there is no padding.
pub fn regression_points<F: Field>(
    field: &F,
    k: usize,
    n: usize,
) -> Result<EvalPoints<F::Elem>, SchemeError> {
    if let Some(order) = field.order() {
        let needed = n.max(k + 1) as u64;
        if order < needed {
            return Err(SchemeError::FieldTooSmall { order, needed });
        }
    }
    let betas = (1..=k as u64).map(|v| field.from_u64(v)).collect();
    let alphas = (0..n as u64).map(|v| field.from_u64(v)).collect();
    EvalPoints::new(k, betas, alphas)
}

use crate::algebra::{khatri_rao, DenseMatrix, ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::model::GlobalSystem;

/// Per-node marginals `[p_1, …, p_n]` of the independence model. The joint
/// distribution is always their Kronecker product.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorState {
    factors: Vec<ProbabilityVector>,
}

impl FactorState {
    pub fn new(factors: Vec<ProbabilityVector>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain(
                "factor state needs at least one factor".into(),
            ));
        }
        Ok(FactorState { factors })
    }

    pub fn factors(&self) -> &[ProbabilityVector] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(ProbabilityVector::dim).collect()
    }

    /// `p̂ = p_1 ⋉ p_2 ⋉ … ⋉ p_n`.
    pub fn joint(&self) -> Result<ProbabilityVector> {
        ProbabilityVector::kron_all(&self.factors)
    }
}

/// One step of the independence model: `p_i(t+1) = Q̂_i (⋉_j p_j(t))`.
pub fn step_independent(lifted: &[StochasticMatrix], state: &FactorState) -> Result<FactorState> {
    Ok(step_independent_flagged(lifted, state)?.0)
}

pub(crate) fn step_independent_flagged(
    lifted: &[StochasticMatrix],
    state: &FactorState,
) -> Result<(FactorState, bool)> {
    check_factor_shapes(lifted, state)?;
    let joint = state.joint()?;
    let mut renormalized = false;
    let factors = lifted
        .iter()
        .map(|q| {
            let (p, flag) = ProbabilityVector::from_step(q.apply(joint.as_slice())?)?;
            renormalized |= flag;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((FactorState { factors }, renormalized))
}

fn check_factor_shapes(lifted: &[StochasticMatrix], state: &FactorState) -> Result<()> {
    if lifted.len() != state.factors.len() {
        return Err(Error::shape(
            "step_independent",
            format!(
                "{} lifted matrices for {} factors",
                lifted.len(),
                state.factors.len()
            ),
        ));
    }
    let k: usize = state.dims().iter().product();
    for (i, (q, p)) in lifted.iter().zip(&state.factors).enumerate() {
        if q.rows() != p.dim() || q.cols() != k {
            return Err(Error::shape(
                "step_independent",
                format!(
                    "node {}: lifted matrix is {}x{}, expected {}x{k}",
                    i + 1,
                    q.rows(),
                    q.cols(),
                    p.dim()
                ),
            ));
        }
    }
    Ok(())
}

/// One step of the conditional-independence model, `p(t+1) = Q p(t)`.
pub fn step_conditional(q: &StochasticMatrix, p: &ProbabilityVector) -> Result<ProbabilityVector> {
    Ok(step_conditional_flagged(q, p)?.0)
}

pub(crate) fn step_conditional_flagged(
    q: &StochasticMatrix,
    p: &ProbabilityVector,
) -> Result<(ProbabilityVector, bool)> {
    if q.rows() != q.cols() || q.cols() != p.dim() {
        return Err(Error::shape(
            "step_conditional",
            format!(
                "{}x{} matrix applied to a {}-vector",
                q.rows(),
                q.cols(),
                p.dim()
            ),
        ));
    }
    ProbabilityVector::from_step(q.apply(p.as_slice())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Independent,
    Conditional,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub t_max: usize,
    /// Stationarity tolerance on `‖p(t+1) − p(t)‖∞`.
    pub tol: f64,
    /// Number of consecutive small steps required.
    pub window: usize,
    /// Stop as soon as stationarity is confirmed; otherwise run to `t_max`
    /// and only record when it happened.
    pub stop_at_stationary: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            t_max: 1000,
            tol: 1e-9,
            window: 5,
            stop_at_stationary: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticTrajectory {
    pub mode: Mode,
    /// Joint distribution at each recorded time, starting at `t = 0`.
    pub joint: Vec<ProbabilityVector>,
    /// Factor marginals at each time (independence model only).
    pub factors: Option<Vec<FactorState>>,
    pub stationary_at: Option<usize>,
    /// Steps whose output had to be renormalized.
    pub renormalized_at: Vec<usize>,
}

impl StochasticTrajectory {
    /// Number of recorded steps (one less than the number of distributions).
    pub fn steps(&self) -> usize {
        self.joint.len() - 1
    }
}

/// Tracks consecutive small steps as a trajectory grows.
struct StationarityTracker {
    tol: f64,
    window: usize,
    run: usize,
    found: Option<usize>,
}

impl StationarityTracker {
    fn new(opts: &SimulationOptions) -> Self {
        StationarityTracker {
            tol: opts.tol,
            window: opts.window.max(1),
            run: 0,
            found: None,
        }
    }

    /// Feeds the step from time `t - 1` to `t`.
    fn push(&mut self, t: usize, prev: &ProbabilityVector, next: &ProbabilityVector) -> bool {
        if self.found.is_some() {
            return true;
        }
        if prev.linf_distance(next) < self.tol {
            self.run += 1;
        } else {
            self.run = 0;
        }
        if self.run >= self.window {
            self.found = Some(t - self.window);
        }
        self.found.is_some()
    }
}

pub fn simulate_independent(
    lifted: &[StochasticMatrix],
    initial: FactorState,
    opts: SimulationOptions,
) -> Result<StochasticTrajectory> {
    check_factor_shapes(lifted, &initial)?;
    let mut tracker = StationarityTracker::new(&opts);
    let mut joint = vec![initial.joint()?];
    let mut factors = vec![initial];
    let mut renormalized_at = Vec::new();
    for t in 1..=opts.t_max {
        let (next, flagged) = step_independent_flagged(lifted, &factors[t - 1])?;
        if flagged {
            renormalized_at.push(t);
        }
        joint.push(next.joint()?);
        factors.push(next);
        if tracker.push(t, &joint[t - 1], &joint[t]) && opts.stop_at_stationary {
            break;
        }
    }
    Ok(StochasticTrajectory {
        mode: Mode::Independent,
        joint,
        factors: Some(factors),
        stationary_at: tracker.found,
        renormalized_at,
    })
}

pub fn simulate_conditional(
    q: &StochasticMatrix,
    initial: ProbabilityVector,
    opts: SimulationOptions,
) -> Result<StochasticTrajectory> {
    let mut tracker = StationarityTracker::new(&opts);
    let mut joint = vec![initial];
    let mut renormalized_at = Vec::new();
    for t in 1..=opts.t_max {
        let (next, flagged) = step_conditional_flagged(q, &joint[t - 1])?;
        if flagged {
            renormalized_at.push(t);
        }
        joint.push(next);
        if tracker.push(t, &joint[t - 1], &joint[t]) && opts.stop_at_stationary {
            break;
        }
    }
    Ok(StochasticTrajectory {
        mode: Mode::Conditional,
        joint,
        factors: None,
        stationary_at: tracker.found,
        renormalized_at,
    })
}

/// Initial condition for [`simulate_stochastic`].
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Factors(FactorState),
    Joint(ProbabilityVector),
}

/// Runs either stochastic model of an assembled system. The conditional model
/// accepts factors (expanded to their product); the independence model only
/// accepts factors.
pub fn simulate_stochastic(
    system: &GlobalSystem,
    initial: Initial,
    mode: Mode,
    opts: SimulationOptions,
) -> Result<StochasticTrajectory> {
    let GlobalSystem::Stochastic {
        transition, lifted, ..
    } = system
    else {
        return Err(Error::Mode(
            "stochastic simulation needs a stochastic model".into(),
        ));
    };
    match (mode, initial) {
        (Mode::Independent, Initial::Factors(f)) => simulate_independent(lifted, f, opts),
        (Mode::Independent, Initial::Joint(_)) => Err(Error::Mode(
            "the independence model starts from per-node factors, not a joint distribution".into(),
        )),
        (Mode::Conditional, Initial::Factors(f)) => {
            simulate_conditional(transition, f.joint()?, opts)
        }
        (Mode::Conditional, Initial::Joint(p)) => {
            if p.dim() != transition.cols() {
                return Err(Error::shape(
                    "simulate_stochastic",
                    format!(
                        "initial vector has {} entries, state space has {}",
                        p.dim(),
                        transition.cols()
                    ),
                ));
            }
            simulate_conditional(transition, p, opts)
        }
        (Mode::MonteCarlo, _) => Err(Error::Mode(
            "Monte Carlo runs need a sample count and seed; use monte_carlo_oracle".into(),
        )),
    }
}

/// First `t` such that `‖p(s+1) − p(s)‖∞ < tol` for every `s` in
/// `[t, t + window)`.
pub fn detect_stationary(traj: &[ProbabilityVector], tol: f64, window: usize) -> Option<usize> {
    let window = window.max(1);
    let small: Vec<bool> = traj
        .windows(2)
        .map(|w| w[0].linf_distance(&w[1]) < tol)
        .collect();
    small.windows(window).position(|w| w.iter().all(|&s| s))
}

/// Per-step L1 distance between the two stochastic models.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    /// `distances[t] = ‖p̂(t) − p(t)‖₁`.
    pub distances: Vec<f64>,
    pub max: f64,
    pub argmax: usize,
}

impl DivergenceReport {
    fn from_distances(distances: Vec<f64>) -> Self {
        let (argmax, max) =
            distances
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (t, d)| {
                    if d > best.1 {
                        (t, d)
                    } else {
                        best
                    }
                });
        DivergenceReport {
            distances,
            max,
            argmax,
        }
    }

    /// First time the divergence exceeds `threshold`.
    pub fn first_exceedance(&self, threshold: f64) -> Option<usize> {
        self.distances.iter().position(|&d| d > threshold)
    }
}

/// Runs both models for `steps` steps from the same product initial
/// `p̂(0) = p(0) = ⋉ p_i(0)` and reports their L1 divergence.
pub fn compare_models(
    lifted: &[StochasticMatrix],
    initial: &FactorState,
    steps: usize,
) -> Result<DivergenceReport> {
    check_factor_shapes(lifted, initial)?;
    let k: usize = initial.dims().iter().product();
    let mut q = DenseMatrix::ones_row(k)?;
    for m in lifted {
        q = khatri_rao(&q, m.matrix())?;
    }
    let q = StochasticMatrix::from_parts(q, crate::limits::STOCHASTIC_TOLERANCE, false);
    let opts = SimulationOptions {
        t_max: steps,
        stop_at_stationary: false,
        ..SimulationOptions::default()
    };
    let independent = simulate_independent(lifted, initial.clone(), opts)?;
    let conditional = simulate_conditional(&q, initial.joint()?, opts)?;
    let distances = independent
        .joint
        .iter()
        .zip(&conditional.joint)
        .map(|(a, b)| a.l1_distance(b))
        .collect();
    Ok(DivergenceReport::from_distances(distances))
}

use crate::algebra::LogicalMatrix;
use crate::error::{Error, Result};

/// One step of `x(t+1) = M x(t)`; states are 1-based global indices.
pub fn step_deterministic(m: &LogicalMatrix, x: usize) -> Result<usize> {
    if x == 0 || x > m.cols() {
        return Err(Error::OutOfRange {
            value: x,
            min: 1,
            max: m.cols(),
        });
    }
    Ok(m.index(x - 1))
}

/// States visited from `x0` until the first repeat (or the step limit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicTrajectory {
    /// `states[t] = x(t)`. When a cycle was found the last entry is the first
    /// repeated state.
    pub states: Vec<usize>,
    /// Time at which the state that closes the cycle was first visited.
    pub transient: Option<usize>,
    pub cycle_length: Option<usize>,
}

impl DeterministicTrajectory {
    /// The attractor states in visiting order, if one was reached.
    pub fn cycle(&self) -> Option<&[usize]> {
        let start = self.transient?;
        let len = self.cycle_length?;
        Some(&self.states[start..start + len])
    }

    /// `x(t)` for any `t`, continuing around the cycle past the recorded
    /// prefix. `None` beyond the recorded prefix when no cycle is known.
    pub fn state_at(&self, t: usize) -> Option<usize> {
        if let Some(&x) = self.states.get(t) {
            return Some(x);
        }
        let start = self.transient?;
        let len = self.cycle_length?;
        Some(self.states[start + (t - start) % len])
    }
}

pub fn simulate_deterministic(
    m: &LogicalMatrix,
    x0: usize,
    t_max: usize,
) -> Result<DeterministicTrajectory> {
    if m.rows() != m.cols() {
        return Err(Error::shape(
            "simulate_deterministic",
            format!("transition matrix is {}x{}", m.rows(), m.cols()),
        ));
    }
    let mut first_seen: Vec<Option<usize>> = vec![None; m.cols()];
    let mut states = Vec::new();
    let mut x = x0;
    step_deterministic(m, x0)?;
    for t in 0..=t_max {
        states.push(x);
        if let Some(s) = first_seen[x - 1] {
            return Ok(DeterministicTrajectory {
                states,
                transient: Some(s),
                cycle_length: Some(t - s),
            });
        }
        first_seen[x - 1] = Some(t);
        x = m.index(x - 1);
    }
    Ok(DeterministicTrajectory {
        states,
        transient: None,
        cycle_length: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_a_fixed_point() {
        let m = LogicalMatrix::identity(4).unwrap();
        for x in 1..=4 {
            assert_eq!(step_deterministic(&m, x).unwrap(), x);
            let traj = simulate_deterministic(&m, x, 10).unwrap();
            assert_eq!(traj.states, vec![x, x]);
            assert_eq!((traj.transient, traj.cycle_length), (Some(0), Some(1)));
        }
        assert!(step_deterministic(&m, 5).is_err());
        assert!(step_deterministic(&m, 0).is_err());
    }

    #[test]
    fn two_cycle() {
        let m = LogicalMatrix::new(2, vec![2, 1]).unwrap();
        let traj = simulate_deterministic(&m, 1, 100).unwrap();
        assert_eq!(traj.cycle(), Some(&[1, 2][..]));
        assert_eq!(traj.state_at(101), Some(2));
    }

    #[test]
    fn transient_then_cycle() {
        // 1 -> 2 -> 3 -> 4 -> 3
        let m = LogicalMatrix::new(4, vec![2, 3, 4, 3]).unwrap();
        let traj = simulate_deterministic(&m, 1, 100).unwrap();
        assert_eq!(traj.states, vec![1, 2, 3, 4, 3]);
        assert_eq!(traj.transient, Some(2));
        assert_eq!(traj.cycle(), Some(&[3, 4][..]));
    }

    #[test]
    fn step_limit_without_repeat() {
        let m = LogicalMatrix::new(4, vec![2, 3, 4, 1]).unwrap();
        let traj = simulate_deterministic(&m, 1, 2).unwrap();
        assert_eq!(traj.states, vec![1, 2, 3]);
        assert_eq!(traj.cycle(), None);
        assert_eq!(traj.state_at(3), None);
    }
}

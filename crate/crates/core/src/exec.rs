//! Trial execution strategies.
//!
//! Every trial draws from its own stream `SimRng::split(i)`, so results do
//! not depend on the execution mode or the thread count.

use serde::{Deserialize, Serialize};

use crate::model::SimRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    /// Parallel when the `parallel` feature is on.
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn available() -> &'static [Execution] {
        #[cfg(feature = "parallel")]
        {
            &[Execution::Sequential, Execution::Parallel]
        }
        #[cfg(not(feature = "parallel"))]
        {
            &[Execution::Sequential]
        }
    }
}

/// Runs `f(i, rng_i)` for `i in 0..trials` and returns the results in order.
pub fn map_trials<T, F>(execution: Execution, seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync + Send,
{
    let base = SimRng::new(seed);
    let run = |i: u64| {
        let mut rng = base.split(i);
        f(i, &mut rng)
    };
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..trials).into_par_iter().map(run).collect()
        }
        Execution::Sequential => (0..trials).map(run).collect(),
    }
}

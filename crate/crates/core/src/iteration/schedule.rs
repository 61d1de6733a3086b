use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One contractive block: factor `λ_k` over `N_k` steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub lambda: f64,
    pub len: usize,
}

impl Block {
    pub fn new(lambda: f64, len: usize) -> Self {
        Self { lambda, len }
    }
}

/// An event index `n_k` closing the block `(n_{k−1}, n_k]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event {
    /// One-based block number `k`.
    pub k: usize,
    /// First step of the block, `n_{k−1} + 1`.
    pub start: usize,
    /// `n_k`
    pub end: usize,
    /// Claimed contraction factor.
    pub factor: f64,
}

/// Claimed block-contraction schedule. Event counting starts at `n_0 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum EventSchedule {
    /// Events at `n_1, n_1 + M, n_1 + 2M, …`, all with factor `λ`.
    Periodic { lambda: f64, gap: usize, first_event: usize },
    /// Consecutive blocks, `n_k = N_1 + … + N_k`. `gap_bound` declares `N_k ≤ M`.
    Heterogeneous {
        blocks: Vec<Block>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_bound: Option<usize>,
    },
    /// Listed event indices with per-block factors.
    Explicit { events: Vec<usize>, factors: Vec<f64> },
}

fn check_factor(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidSchedule(format!("factor {lambda} is not in (0, 1)")));
    }
    Ok(())
}

impl EventSchedule {
    pub fn periodic(lambda: f64, gap: usize, first_event: usize) -> Result<Self> {
        let s = Self::Periodic { lambda, gap, first_event };
        s.validate()?;
        Ok(s)
    }

    pub fn heterogeneous(blocks: Vec<Block>) -> Result<Self> {
        let s = Self::Heterogeneous { blocks, gap_bound: None };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Periodic { lambda, gap, first_event } => {
                check_factor(*lambda)?;
                if *gap == 0 || *first_event == 0 {
                    return Err(Error::InvalidSchedule("gap and first event must be ≥ 1".into()));
                }
            }
            Self::Heterogeneous { blocks, gap_bound } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidSchedule("no blocks".into()));
                }
                for b in blocks {
                    check_factor(b.lambda)?;
                    if b.len == 0 {
                        return Err(Error::InvalidSchedule("block length must be ≥ 1".into()));
                    }
                    if let Some(m) = gap_bound {
                        if b.len > *m {
                            return Err(Error::InvalidSchedule(format!(
                                "block length {} exceeds the declared gap bound {m}",
                                b.len
                            )));
                        }
                    }
                }
            }
            Self::Explicit { events, factors } => {
                if events.is_empty() {
                    return Err(Error::InvalidSchedule("no events".into()));
                }
                if events.len() != factors.len() {
                    return Err(Error::InvalidSchedule("one factor per event required".into()));
                }
                if events[0] == 0 || events.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidSchedule("event indices must be ≥ 1 and strictly increasing".into()));
                }
                factors.iter().try_for_each(|f| check_factor(*f))?;
            }
        }
        Ok(())
    }

    pub fn first_event(&self) -> usize {
        match self {
            Self::Periodic { first_event, .. } => *first_event,
            Self::Heterogeneous { blocks, .. } => blocks[0].len,
            Self::Explicit { events, .. } => events[0],
        }
    }

    /// Events with `n_k ≤ n_max`.
    pub fn events_until(&self, n_max: usize) -> Vec<Event> {
        let mut out = Vec::new();
        let mut prev = 0;
        let mut push = |k: usize, end: usize, factor: f64, prev: &mut usize| {
            out.push(Event { k, start: *prev + 1, end, factor });
            *prev = end;
        };
        match self {
            Self::Periodic { lambda, gap, first_event } => {
                let mut end = *first_event;
                let mut k = 1;
                while end <= n_max {
                    push(k, end, *lambda, &mut prev);
                    end += gap;
                    k += 1;
                }
            }
            Self::Heterogeneous { blocks, .. } => {
                let mut end = 0;
                for (i, b) in blocks.iter().enumerate() {
                    end += b.len;
                    if end > n_max {
                        break;
                    }
                    push(i + 1, end, b.lambda, &mut prev);
                }
            }
            Self::Explicit { events, factors } => {
                for (i, (&end, &f)) in events.iter().zip(factors).enumerate() {
                    if end > n_max {
                        break;
                    }
                    push(i + 1, end, f, &mut prev);
                }
            }
        }
        out
    }

    /// The first `count` blocks as `(λ_k, N_k)`.
    pub fn blocks(&self, count: usize) -> Result<Vec<Block>> {
        match self {
            Self::Periodic { lambda, gap, first_event } => {
                Ok((0..count).map(|k| Block::new(*lambda, if k == 0 { *first_event } else { *gap })).collect())
            }
            Self::Heterogeneous { blocks, .. } => {
                if blocks.len() < count {
                    return Err(Error::InvalidSchedule(format!(
                        "schedule has {} blocks, {count} requested",
                        blocks.len()
                    )));
                }
                Ok(blocks[..count].to_vec())
            }
            Self::Explicit { events, factors } => {
                if events.len() < count {
                    return Err(Error::InvalidSchedule(format!(
                        "schedule has {} events, {count} requested",
                        events.len()
                    )));
                }
                let mut prev = 0;
                Ok(events[..count]
                    .iter()
                    .zip(factors)
                    .map(|(&e, &f)| {
                        let b = Block::new(f, e - prev);
                        prev = e;
                        b
                    })
                    .collect())
            }
        }
    }

    /// Declared bound `M` on block lengths, when there is one.
    pub fn gap_bound(&self) -> Option<usize> {
        match self {
            Self::Periodic { gap, first_event, .. } => (*first_event <= *gap).then_some(*gap),
            Self::Heterogeneous { gap_bound, .. } => *gap_bound,
            Self::Explicit { .. } => None,
        }
    }

    /// Number of blocks, `None` when unbounded.
    pub fn block_count(&self) -> Option<usize> {
        match self {
            Self::Periodic { .. } => None,
            Self::Heterogeneous { blocks, .. } => Some(blocks.len()),
            Self::Explicit { events, .. } => Some(events.len()),
        }
    }
}

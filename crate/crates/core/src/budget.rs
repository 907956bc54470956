use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Work limits for the enumerative operations. Exceeding one is an error, not
/// a silent truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Max ordered pairs `|S1||S2|` for an explicit SL2 product set; `24^6`.
    pub product_pairs: u64,
    /// Max `|A|` for `R(A)·R(A)` and the `ν` statistics.
    pub sl2_max_size: usize,
    /// Max `|A|` for the `|A|^8` hash join behind the direct collision count.
    pub collision_max_size: usize,
    /// Max `|A|` for fibred Heisenberg product-set sizes.
    pub heis_max_size: usize,
    /// Max ordered pairs for an explicit Heisenberg cube product set.
    pub heis_pairs: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            product_pairs: 24u64.pow(6),
            sl2_max_size: 24,
            collision_max_size: 8,
            heis_max_size: 10,
            heis_pairs: 1 << 24,
        }
    }
}

pub(crate) fn guard(what: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::BudgetExceeded {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}

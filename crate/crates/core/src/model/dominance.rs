use std::cmp::Ordering;

use super::ShiftedVariant;

/// Anything priced by a (cost, profit) pair.
pub trait CostProfit {
    fn cost(&self) -> f64;
    fn profit(&self) -> f64;
}

impl CostProfit for ShiftedVariant {
    fn cost(&self) -> f64 {
        self.cost
    }
    fn profit(&self) -> f64 {
        self.profit
    }
}

impl CostProfit for (f64, f64) {
    fn cost(&self) -> f64 {
        self.0
    }
    fn profit(&self) -> f64 {
        self.1
    }
}

impl<T: CostProfit> CostProfit for &T {
    fn cost(&self) -> f64 {
        (*self).cost()
    }
    fn profit(&self) -> f64 {
        (*self).profit()
    }
}

/// Indices of the items no other item dominates, in their original order.
///
/// `a` is dominated by `b` when `b` costs no more and earns no less. Among
/// exact duplicates the lowest index survives.
pub fn dominance_frontier<T: CostProfit>(items: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        items[a]
            .cost()
            .total_cmp(&items[b].cost())
            .then_with(|| items[b].profit().total_cmp(&items[a].profit()))
            .then(a.cmp(&b))
    });
    let mut best: Option<f64> = None;
    let mut kept = Vec::new();
    for idx in order {
        let profit = items[idx].profit();
        if best.is_none_or(|b| profit.total_cmp(&b) == Ordering::Greater) {
            best = Some(profit);
            kept.push(idx);
        }
    }
    kept.sort_unstable();
    kept
}

pub fn prune_dominated<T: CostProfit + Clone>(items: &[T]) -> Vec<T> {
    dominance_frontier(items)
        .into_iter()
        .map(|i| items[i].clone())
        .collect()
}

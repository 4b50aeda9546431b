//! Greedy packing of fixed projects under yearly production caps.
//!
//! Projects are taken in launch order. Each one gets the earliest shift, no
//! earlier than the previous scheduled shift, at which its truncated profile
//! fits under the caps on top of what is already placed. A project that fits
//! at no allowed shift is left out.

use crate::error::{PlanError, Result};
use crate::model::{discount_factors, fits, shift_with_factors, Choice, DiscountConfig, Instance, Solution};

/// Launch order over the clusters that have a project.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Self {
        Self(order)
    }

    /// Selected clusters in index order.
    pub fn identity(selection: &[Option<usize>]) -> Self {
        Self(
            selection
                .iter()
                .enumerate()
                .filter_map(|(k, p)| p.map(|_| k))
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut order = self.0.clone();
        order.swap(i, j);
        Self(order)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Start shifts chosen by the packer and the resulting totals.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Shift per cluster; `None` for clusters without a project or left out.
    pub shifts: Vec<Option<usize>>,
    pub totals: Vec<f64>,
    pub objective: f64,
    pub spent: f64,
}

impl Schedule {
    pub fn scheduled(&self) -> usize {
        self.shifts.iter().flatten().count()
    }

    pub fn to_solution(
        &self,
        instance: &Instance,
        selection: &[Option<usize>],
        config: &DiscountConfig,
    ) -> Result<Solution> {
        let choices = selection
            .iter()
            .zip(&self.shifts)
            .map(|(p, s)| match (p, s) {
                (Some(project), Some(shift)) => Some(Choice::new(*project, *shift)),
                _ => None,
            })
            .collect();
        Solution::evaluate(instance, choices, config)
    }
}

/// `cap(t) - totals(t)` per year; a schedule respects the caps iff all are `>= 0`.
pub fn check_capacity(schedule: &Schedule, instance: &Instance) -> Vec<f64> {
    instance
        .cap
        .iter()
        .zip(&schedule.totals)
        .map(|(cap, total)| cap - total)
        .collect()
}

/// Per cluster and project, whether some allowed shift produces something
/// inside the horizon while respecting the caps with no other project running.
/// Projects failing this can never be launched.
pub fn launchable_alone(instance: &Instance, config: &DiscountConfig) -> Vec<Vec<bool>> {
    let factors = discount_factors(config.rho, instance.horizon);
    let max_shift = config.max_shift(instance.horizon);
    instance
        .clusters
        .iter()
        .map(|cluster| {
            cluster
                .projects
                .iter()
                .map(|p| {
                    (0..=max_shift).any(|shift| {
                        let v = shift_with_factors(p, shift, &factors);
                        !v.is_empty() && v.production.iter().zip(&instance.cap).all(|(&d, &c)| fits(d, c))
                    })
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Lane {
    production: Vec<f64>,
    profit: Vec<f64>,
    cost: Vec<f64>,
}

/// Partially packed schedule.
#[derive(Debug, Clone)]
pub struct PackState {
    totals: Vec<f64>,
    floor: usize,
    shifts: Vec<Option<usize>>,
}

impl PackState {
    pub fn shifts(&self) -> &[Option<usize>] {
        &self.shifts
    }

    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    /// Shift of the most recently scheduled project (0 before any).
    pub fn floor(&self) -> usize {
        self.floor
    }
}

/// Pre-priced projects of one selection, ready for repeated packing.
#[derive(Debug, Clone)]
pub struct PackingModel<'a> {
    cap: &'a [f64],
    max_shift: usize,
    lanes: Vec<Option<Lane>>,
}

impl<'a> PackingModel<'a> {
    pub fn new(instance: &'a Instance, selection: &[Option<usize>], config: &DiscountConfig) -> Result<Self> {
        config.validate(instance.horizon)?;
        if selection.len() != instance.cluster_count() {
            return Err(PlanError::SelectionLength {
                expected: instance.cluster_count(),
                got: selection.len(),
            });
        }
        let horizon = instance.horizon;
        let max_shift = config.max_shift(horizon);
        let factors = discount_factors(config.rho, horizon);
        let lanes = selection
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.map(|project| {
                    let project = instance.project(k, project)?;
                    let mut profit = Vec::with_capacity(max_shift + 1);
                    let mut cost = Vec::with_capacity(max_shift + 1);
                    for shift in 0..=max_shift {
                        let (mut q, mut c) = (0.0, 0.0);
                        for year in shift..horizon {
                            q += factors[year] * project.revenue[year - shift];
                            c += factors[year] * project.cost_schedule[year - shift];
                        }
                        profit.push(q);
                        cost.push(c);
                    }
                    Ok(Lane {
                        production: project.production.clone(),
                        profit,
                        cost,
                    })
                })
                .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cap: &instance.cap,
            max_shift,
            lanes,
        })
    }

    pub fn horizon(&self) -> usize {
        self.cap.len()
    }

    pub fn is_selected(&self, cluster: usize) -> bool {
        matches!(self.lanes.get(cluster), Some(Some(_)))
    }

    pub fn selected_count(&self) -> usize {
        self.lanes.iter().flatten().count()
    }

    /// Profit of `cluster`'s project launched with `shift`.
    pub fn profit(&self, cluster: usize, shift: usize) -> f64 {
        self.lane(cluster).profit[shift]
    }

    fn lane(&self, cluster: usize) -> &Lane {
        self.lanes[cluster].as_ref().expect("cluster has no selected project")
    }

    pub fn empty_state(&self) -> PackState {
        PackState {
            totals: vec![0.0; self.horizon()],
            floor: 0,
            shifts: vec![None; self.lanes.len()],
        }
    }

    fn fits_at(&self, totals: &[f64], lane: &Lane, shift: usize) -> bool {
        totals[shift..]
            .iter()
            .zip(&self.cap[shift..])
            .zip(&lane.production)
            .all(|((&total, &cap), &d)| d == 0.0 || fits(total + d, cap))
    }

    /// Earliest shift `>= state.floor()` at which `cluster` fits, if any.
    pub fn earliest_start(&self, state: &PackState, cluster: usize) -> Option<usize> {
        let lane = self.lane(cluster);
        (state.floor..=self.max_shift).find(|&shift| self.fits_at(&state.totals, lane, shift))
    }

    /// Schedules `cluster` at its earliest start; returns the shift, or `None`
    /// when the project fits nowhere and is left out.
    pub fn place(&self, state: &mut PackState, cluster: usize) -> Option<usize> {
        let shift = self.earliest_start(state, cluster)?;
        let lane = self.lane(cluster);
        for (total, &d) in state.totals[shift..].iter_mut().zip(&lane.production) {
            *total += d;
        }
        state.floor = shift;
        state.shifts[cluster] = Some(shift);
        Some(shift)
    }

    /// Objective of a set of shifts, summed in cluster order.
    pub fn objective(&self, shifts: &[Option<usize>]) -> f64 {
        shifts
            .iter()
            .enumerate()
            .filter_map(|(k, s)| s.map(|s| self.lane(k).profit[s]))
            .sum()
    }

    fn spent(&self, shifts: &[Option<usize>]) -> f64 {
        shifts
            .iter()
            .enumerate()
            .filter_map(|(k, s)| s.map(|s| self.lane(k).cost[s]))
            .sum()
    }

    /// Packs clusters in `order` on top of `state`.
    pub fn pack_from(&self, mut state: PackState, order: &[usize]) -> PackState {
        for &cluster in order {
            self.place(&mut state, cluster);
        }
        state
    }

    pub fn finish(&self, state: PackState) -> Schedule {
        Schedule {
            objective: self.objective(&state.shifts),
            spent: self.spent(&state.shifts),
            totals: state.totals,
            shifts: state.shifts,
        }
    }

    pub fn pack(&self, order: &Permutation) -> Result<Schedule> {
        self.check_permutation(order)?;
        Ok(self.finish(self.pack_from(self.empty_state(), order.as_slice())))
    }

    pub fn check_permutation(&self, order: &Permutation) -> Result<()> {
        let mut seen = vec![false; self.lanes.len()];
        for &k in order.as_slice() {
            if k >= self.lanes.len() {
                return Err(PlanError::InvalidPermutation(format!("cluster {k} out of range")));
            }
            if !self.is_selected(k) {
                return Err(PlanError::InvalidPermutation(format!("cluster {k} has no project")));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(PlanError::InvalidPermutation(format!("cluster {k} repeated")));
            }
        }
        if order.len() != self.selected_count() {
            return Err(PlanError::InvalidPermutation(format!(
                "{} of {} selected clusters ordered",
                order.len(),
                self.selected_count()
            )));
        }
        Ok(())
    }
}

/// Greedily packs the selected projects in the order `pi`.
pub fn greedy_pack(
    selection: &[Option<usize>],
    pi: &Permutation,
    instance: &Instance,
    config: &DiscountConfig,
) -> Result<Schedule> {
    PackingModel::new(instance, selection, config)?.pack(pi)
}

//! Exact branch-and-bound solver for desk-scale instances.
//!
//! Depth-first search over nurses in index order; intended as an optimality
//! oracle for instances with up to roughly 8 nurses and 40 patterns. Two
//! admissible prunes are applied:
//!
//! * cost bound: partial cost plus the sum of each unassigned nurse's
//!   cheapest feasible pattern must stay below the incumbent;
//! * cover bound: on every (slot, grade) cell, current cover plus the number
//!   of unassigned nurses that could still cover the cell must reach demand.
//!
//! With no time budget the search is fully deterministic for a fixed
//! instance.

use crate::problem::{ProblemInstance, Roster, SLOT_COUNT};
use std::time::{Duration, Instant};

/// Search budgets. `max_nodes` bounds the number of pattern assignments
/// explored; `time_budget` is wall-clock and therefore makes the outcome
/// machine-dependent (leave it `None` for reproducible runs).
#[derive(Debug, Clone, Copy)]
pub struct SolveLimits {
    pub max_nodes: u64,
    pub time_budget: Option<Duration>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            max_nodes: 20_000_000,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOutcome {
    /// A minimum-cost feasible roster; no feasible roster is cheaper.
    Optimal { roster: Roster, cost: u32 },
    /// The full search space contains no feasible roster.
    ProvenInfeasible,
    /// A budget was hit before the search completed. `best` is the cheapest
    /// feasible roster seen so far, if any.
    BudgetExceeded {
        best: Option<(Roster, u32)>,
        nodes: u64,
    },
}

struct Search<'a> {
    inst: &'a ProblemInstance,
    limits: SolveLimits,
    started: Instant,
    nodes: u64,
    out_of_budget: bool,
    /// Feasible patterns per nurse, sorted by (cost, index).
    candidates: Vec<Vec<usize>>,
    /// Cheapest possible completion cost from nurse i onwards.
    min_cost_suffix: Vec<u32>,
    /// Whether nurse i can cover slot k with some feasible pattern.
    can_cover: Vec<[bool; SLOT_COUNT]>,
    /// Per (slot, grade): cover still obtainable from unassigned nurses.
    potential: Vec<Vec<u32>>,
    cover: Vec<Vec<u32>>,
    assignment: Vec<usize>,
    incumbent: Option<(Roster, u32)>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a ProblemInstance, limits: SolveLimits) -> Self {
        let n = inst.nurse_count();
        let grades = inst.grade_count() as usize;

        let mut candidates = Vec::with_capacity(n);
        let mut min_cost = Vec::with_capacity(n);
        let mut can_cover = Vec::with_capacity(n);
        for i in 0..n {
            let mut sorted: Vec<usize> = inst.feasible_set(i).to_vec();
            sorted.sort_by_key(|&j| (inst.pref_cost(i, j), j));
            min_cost.push(inst.pref_cost(i, sorted[0]));
            let mut cover = [false; SLOT_COUNT];
            for &j in &sorted {
                for k in inst.pattern(j).covered_slots() {
                    cover[k] = true;
                }
            }
            can_cover.push(cover);
            candidates.push(sorted);
        }

        let mut min_cost_suffix = vec![0u32; n + 1];
        for i in (0..n).rev() {
            min_cost_suffix[i] = min_cost_suffix[i + 1] + min_cost[i];
        }

        let mut potential = vec![vec![0u32; grades]; SLOT_COUNT];
        for i in 0..n {
            let grade = inst.nurses()[i].grade as usize;
            for k in 0..SLOT_COUNT {
                if can_cover[i][k] {
                    for cell in potential[k].iter_mut().skip(grade - 1) {
                        *cell += 1;
                    }
                }
            }
        }

        Self {
            inst,
            limits,
            started: Instant::now(),
            nodes: 0,
            out_of_budget: false,
            candidates,
            min_cost_suffix,
            can_cover,
            potential,
            cover: vec![vec![0u32; grades]; SLOT_COUNT],
            assignment: vec![0; n],
            incumbent: None,
        }
    }

    fn budget_hit(&mut self) -> bool {
        if self.out_of_budget {
            return true;
        }
        if self.nodes >= self.limits.max_nodes {
            self.out_of_budget = true;
        } else if let Some(budget) = self.limits.time_budget {
            if self.nodes % 1024 == 0 && self.started.elapsed() >= budget {
                self.out_of_budget = true;
            }
        }
        self.out_of_budget
    }

    /// Demand can still be met on every cell given remaining potential cover.
    fn cover_reachable(&self) -> bool {
        let grades = self.inst.grade_count() as usize;
        for k in 0..SLOT_COUNT {
            for s in 0..grades {
                if self.cover[k][s] + self.potential[k][s] < self.inst.demand(k, s) {
                    return false;
                }
            }
        }
        true
    }

    fn adjust_pattern_cover(&mut self, nurse: usize, pattern: usize, add: bool) {
        let grade = self.inst.nurses()[nurse].grade as usize;
        for k in self.inst.pattern(pattern).covered_slots() {
            for cell in self.cover[k].iter_mut().skip(grade - 1) {
                if add {
                    *cell += 1;
                } else {
                    *cell -= 1;
                }
            }
        }
    }

    fn adjust_potential(&mut self, nurse: usize, add: bool) {
        let grade = self.inst.nurses()[nurse].grade as usize;
        for k in 0..SLOT_COUNT {
            if self.can_cover[nurse][k] {
                for cell in self.potential[k].iter_mut().skip(grade - 1) {
                    if add {
                        *cell += 1;
                    } else {
                        *cell -= 1;
                    }
                }
            }
        }
    }

    fn dfs(&mut self, nurse: usize, partial_cost: u32) {
        if nurse == self.inst.nurse_count() {
            // Cover feasibility was maintained incrementally: with no nurses
            // left, `cover_reachable` degenerates to the feasibility check.
            let better = match &self.incumbent {
                Some((_, best)) => partial_cost < *best,
                None => true,
            };
            if better {
                self.incumbent = Some((Roster::new(self.assignment.clone()), partial_cost));
            }
            return;
        }

        let candidates = self.candidates[nurse].clone();
        self.adjust_potential(nurse, false);
        for j in candidates {
            if self.budget_hit() {
                break;
            }
            self.nodes += 1;

            let cost = partial_cost + self.inst.pref_cost(nurse, j);
            if let Some((_, best)) = &self.incumbent {
                if cost + self.min_cost_suffix[nurse + 1] >= *best {
                    // Candidates are cost-sorted: no later one can improve.
                    break;
                }
            }

            self.assignment[nurse] = j;
            self.adjust_pattern_cover(nurse, j, true);
            if self.cover_reachable() {
                self.dfs(nurse + 1, cost);
            }
            self.adjust_pattern_cover(nurse, j, false);
        }
        self.adjust_potential(nurse, true);
    }
}

/// Minimizes roster cost by exhaustive branch-and-bound.
pub fn exact_solve(inst: &ProblemInstance, limits: SolveLimits) -> ExactOutcome {
    let mut search = Search::new(inst, limits);
    search.dfs(0, 0);
    let nodes = search.nodes;
    if search.out_of_budget {
        return ExactOutcome::BudgetExceeded {
            best: search.incumbent,
            nodes,
        };
    }
    match search.incumbent {
        Some((roster, cost)) => ExactOutcome::Optimal { roster, cost },
        None => ExactOutcome::ProvenInfeasible,
    }
}

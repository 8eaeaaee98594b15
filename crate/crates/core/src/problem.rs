//! The weekly rostering model: shift patterns, nurses, problem instances,
//! rosters and their evaluation.
//!
//! A week has 14 slots: slots `0..7` are the seven days, slots `7..14` the
//! seven nights. Each nurse works exactly one shift pattern drawn from her
//! feasible set, which is determined by her contract. Demand is stated per
//! (slot, grade) cell and a nurse of grade `g` counts towards every grade
//! `s >= g` (grade 1 is the highest and may substitute for all others).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Slots per week: 7 days followed by 7 nights.
pub const SLOT_COUNT: usize = 14;
/// Number of day slots; slots `DAY_SLOTS..SLOT_COUNT` are nights.
pub const DAY_SLOTS: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("instance must have at least one nurse")]
    NoNurses,
    #[error("instance must have at least one shift pattern")]
    NoPatterns,
    #[error("grade count must be at least 1")]
    NoGrades,
    #[error("nurse {nurse}: grade {grade} outside 1..={grades}")]
    GradeOutOfRange { nurse: usize, grade: u8, grades: u8 },
    #[error("nurse {nurse}: {contract} shifts {shifts} outside 0..={max}")]
    ShiftsOutOfRange {
        nurse: usize,
        contract: &'static str,
        shifts: u8,
        max: u8,
    },
    #[error("preference cost matrix must be {nurses}x{patterns}, row {row} has {got} entries")]
    CostRowLength {
        nurses: usize,
        patterns: usize,
        row: usize,
        got: usize,
    },
    #[error("preference cost matrix must have {nurses} rows, got {got}")]
    CostRowCount { nurses: usize, got: usize },
    #[error("demand matrix must have {SLOT_COUNT} rows, got {got}")]
    DemandRowCount { got: usize },
    #[error("demand row {row} must have {grades} entries, got {got}")]
    DemandRowLength { row: usize, grades: u8, got: usize },
    #[error("nurse {nurse} has no feasible shift pattern in the catalog")]
    EmptyFeasibleSet { nurse: usize },
    #[error("roster has {got} assignments for {nurses} nurses")]
    RosterLength { nurses: usize, got: usize },
    #[error("roster assigns nurse {nurse} pattern {pattern}, which is not in her feasible set")]
    InfeasiblePattern { nurse: usize, pattern: usize },
}

/// A weekly shift pattern: which of the 14 day/night slots are worked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftPattern {
    slots: [bool; SLOT_COUNT],
}

impl ShiftPattern {
    pub fn new(slots: [bool; SLOT_COUNT]) -> Self {
        Self { slots }
    }

    /// Parses a pattern from a 14-character string over `{0,1}`,
    /// e.g. `"11111000000000"` for the first five days.
    pub fn from_bit_str(s: &str) -> Result<Self, String> {
        if s.len() != SLOT_COUNT {
            return Err(format!(
                "pattern string must have {SLOT_COUNT} characters, got {}",
                s.len()
            ));
        }
        let mut slots = [false; SLOT_COUNT];
        for (i, c) in s.chars().enumerate() {
            slots[i] = match c {
                '0' => false,
                '1' => true,
                other => return Err(format!("pattern character {i} is '{other}', expected 0 or 1")),
            };
        }
        Ok(Self { slots })
    }

    pub fn to_bit_string(&self) -> String {
        self.slots.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Whether slot `k` (0-based, days then nights) is worked.
    pub fn covers(&self, slot: usize) -> bool {
        self.slots[slot]
    }

    pub fn day_count(&self) -> usize {
        self.slots[..DAY_SLOTS].iter().filter(|&&b| b).count()
    }

    pub fn night_count(&self) -> usize {
        self.slots[DAY_SLOTS..].iter().filter(|&&b| b).count()
    }

    pub fn total_count(&self) -> usize {
        self.slots.iter().filter(|&&b| b).count()
    }

    /// Slots worked, in increasing order.
    pub fn covered_slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..SLOT_COUNT).filter(move |&k| self.slots[k])
    }
}

impl fmt::Display for ShiftPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// A nurse's weekly working contract: how many shifts, and on which half of
/// the week. `Both` contracts accept any mix of days and nights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Contract {
    Days { shifts: u8 },
    Nights { shifts: u8 },
    Both { shifts: u8 },
}

impl Contract {
    pub fn shifts(&self) -> u8 {
        match *self {
            Contract::Days { shifts } | Contract::Nights { shifts } | Contract::Both { shifts } => {
                shifts
            }
        }
    }

    /// True when `pattern` satisfies this contract.
    pub fn admits(&self, pattern: &ShiftPattern) -> bool {
        match *self {
            Contract::Days { shifts } => {
                pattern.night_count() == 0 && pattern.day_count() == shifts as usize
            }
            Contract::Nights { shifts } => {
                pattern.day_count() == 0 && pattern.night_count() == shifts as usize
            }
            Contract::Both { shifts } => pattern.total_count() == shifts as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nurse {
    /// Grade in `1..=p`, 1 being the highest.
    pub grade: u8,
    pub contract: Contract,
}

/// The indices of all catalog patterns a nurse may work.
pub fn feasible_patterns(nurse: &Nurse, patterns: &[ShiftPattern]) -> Vec<usize> {
    patterns
        .iter()
        .enumerate()
        .filter(|(_, p)| nurse.contract.admits(p))
        .map(|(j, _)| j)
        .collect()
}

/// An immutable rostering problem: nurses, the pattern catalog, the
/// preference cost matrix and the per-(slot, grade) demand.
///
/// Feasible sets are computed once at construction; instances with a nurse
/// that cannot work any catalog pattern are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    nurses: Vec<Nurse>,
    patterns: Vec<ShiftPattern>,
    pref_cost: Vec<Vec<u32>>,
    demand: Vec<Vec<u32>>,
    grade_count: u8,
    feasible_sets: Vec<Vec<usize>>,
}

impl ProblemInstance {
    pub fn new(
        grade_count: u8,
        nurses: Vec<Nurse>,
        patterns: Vec<ShiftPattern>,
        pref_cost: Vec<Vec<u32>>,
        demand: Vec<Vec<u32>>,
    ) -> Result<Self, ProblemError> {
        if grade_count == 0 {
            return Err(ProblemError::NoGrades);
        }
        if nurses.is_empty() {
            return Err(ProblemError::NoNurses);
        }
        if patterns.is_empty() {
            return Err(ProblemError::NoPatterns);
        }
        for (i, nurse) in nurses.iter().enumerate() {
            if nurse.grade == 0 || nurse.grade > grade_count {
                return Err(ProblemError::GradeOutOfRange {
                    nurse: i,
                    grade: nurse.grade,
                    grades: grade_count,
                });
            }
            let (label, max) = match nurse.contract {
                Contract::Days { .. } => ("day", DAY_SLOTS as u8),
                Contract::Nights { .. } => ("night", DAY_SLOTS as u8),
                Contract::Both { .. } => ("combined", SLOT_COUNT as u8),
            };
            if nurse.contract.shifts() > max {
                return Err(ProblemError::ShiftsOutOfRange {
                    nurse: i,
                    contract: label,
                    shifts: nurse.contract.shifts(),
                    max,
                });
            }
        }
        if pref_cost.len() != nurses.len() {
            return Err(ProblemError::CostRowCount {
                nurses: nurses.len(),
                got: pref_cost.len(),
            });
        }
        for (i, row) in pref_cost.iter().enumerate() {
            if row.len() != patterns.len() {
                return Err(ProblemError::CostRowLength {
                    nurses: nurses.len(),
                    patterns: patterns.len(),
                    row: i,
                    got: row.len(),
                });
            }
        }
        if demand.len() != SLOT_COUNT {
            return Err(ProblemError::DemandRowCount { got: demand.len() });
        }
        for (k, row) in demand.iter().enumerate() {
            if row.len() != grade_count as usize {
                return Err(ProblemError::DemandRowLength {
                    row: k,
                    grades: grade_count,
                    got: row.len(),
                });
            }
        }
        let feasible_sets: Vec<Vec<usize>> = nurses
            .iter()
            .map(|n| feasible_patterns(n, &patterns))
            .collect();
        if let Some(nurse) = feasible_sets.iter().position(Vec::is_empty) {
            return Err(ProblemError::EmptyFeasibleSet { nurse });
        }
        Ok(Self {
            nurses,
            patterns,
            pref_cost,
            demand,
            grade_count,
            feasible_sets,
        })
    }

    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn grade_count(&self) -> u8 {
        self.grade_count
    }

    pub fn nurses(&self) -> &[Nurse] {
        &self.nurses
    }

    pub fn patterns(&self) -> &[ShiftPattern] {
        &self.patterns
    }

    pub fn pattern(&self, j: usize) -> &ShiftPattern {
        &self.patterns[j]
    }

    pub fn pref_cost(&self, nurse: usize, pattern: usize) -> u32 {
        self.pref_cost[nurse][pattern]
    }

    pub fn pref_cost_rows(&self) -> &[Vec<u32>] {
        &self.pref_cost
    }

    /// Demand for grade column `s` (0-based) on slot `k`.
    pub fn demand(&self, slot: usize, grade_col: usize) -> u32 {
        self.demand[slot][grade_col]
    }

    pub fn demand_rows(&self) -> &[Vec<u32>] {
        &self.demand
    }

    pub fn total_demand(&self) -> u64 {
        self.demand.iter().flatten().map(|&d| u64::from(d)).sum()
    }

    /// The feasible pattern indices for nurse `i`.
    pub fn feasible_set(&self, nurse: usize) -> &[usize] {
        &self.feasible_sets[nurse]
    }

    /// Mean preference cost over all (nurse, pattern) cells.
    pub fn mean_pref_cost(&self) -> f64 {
        let total: u64 = self.pref_cost.iter().flatten().map(|&c| u64::from(c)).sum();
        total as f64 / (self.nurse_count() * self.pattern_count()) as f64
    }

    /// Checks that `roster` assigns every nurse a pattern from her feasible set.
    pub fn validate_roster(&self, roster: &Roster) -> Result<(), ProblemError> {
        if roster.assignment.len() != self.nurse_count() {
            return Err(ProblemError::RosterLength {
                nurses: self.nurse_count(),
                got: roster.assignment.len(),
            });
        }
        for (i, &j) in roster.assignment.iter().enumerate() {
            if !self.feasible_sets[i].contains(&j) {
                return Err(ProblemError::InfeasiblePattern { nurse: i, pattern: j });
            }
        }
        Ok(())
    }
}

/// One shift pattern index per nurse. Rosters produced by the solvers always
/// satisfy the one-feasible-pattern-per-nurse constraint by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Roster {
    pub assignment: Vec<usize>,
}

impl Roster {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self { assignment }
    }

    pub fn pattern_for(&self, nurse: usize) -> usize {
        self.assignment[nurse]
    }
}

/// Total preference cost of a roster.
pub fn roster_cost(inst: &ProblemInstance, roster: &Roster) -> u32 {
    roster
        .assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| inst.pref_cost(i, j))
        .sum()
}

/// Per-(slot, grade) cover provided by a roster, with grade substitution.
pub fn coverage(inst: &ProblemInstance, roster: &Roster) -> Vec<Vec<u32>> {
    let grades = inst.grade_count() as usize;
    let mut cover = vec![vec![0u32; grades]; SLOT_COUNT];
    for (i, &j) in roster.assignment.iter().enumerate() {
        let grade = inst.nurses()[i].grade as usize;
        let pattern = inst.pattern(j);
        for k in pattern.covered_slots() {
            for cell in cover[k].iter_mut().skip(grade - 1) {
                *cell += 1;
            }
        }
    }
    cover
}

/// Per-(slot, grade) uncovered demand: `max(R_ks - cover_ks, 0)`.
pub fn coverage_shortfall(inst: &ProblemInstance, roster: &Roster) -> Vec<Vec<u32>> {
    let cover = coverage(inst, roster);
    let mut shortfall = vec![vec![0u32; inst.grade_count() as usize]; SLOT_COUNT];
    for k in 0..SLOT_COUNT {
        for s in 0..inst.grade_count() as usize {
            shortfall[k][s] = inst.demand(k, s).saturating_sub(cover[k][s]);
        }
    }
    shortfall
}

/// True when demand is met on every (slot, grade) cell.
pub fn is_feasible(inst: &ProblemInstance, roster: &Roster) -> bool {
    total_shortfall(inst, roster) == 0
}

/// Sum of all shortfall cells. Single pass over a flat cover buffer; this is
/// the solvers' evaluation hot path.
pub fn total_shortfall(inst: &ProblemInstance, roster: &Roster) -> u32 {
    let grades = inst.grade_count() as usize;
    let mut cover = vec![0u32; SLOT_COUNT * grades];
    for (i, &j) in roster.assignment.iter().enumerate() {
        let grade = inst.nurses()[i].grade as usize;
        for k in inst.pattern(j).covered_slots() {
            for cell in cover[k * grades + grade - 1..(k + 1) * grades].iter_mut() {
                *cell += 1;
            }
        }
    }
    let mut total = 0;
    for k in 0..SLOT_COUNT {
        for s in 0..grades {
            total += inst.demand(k, s).saturating_sub(cover[k * grades + s]);
        }
    }
    total
}

/// Penalized objective: preference cost plus `w_demand` per uncovered shift.
/// Equals [`roster_cost`] exactly on feasible rosters.
pub fn penalty_fitness(inst: &ProblemInstance, roster: &Roster, w_demand: f64) -> f64 {
    f64::from(roster_cost(inst, roster)) + w_demand * f64::from(total_shortfall(inst, roster))
}

/// A trial outcome: either a feasible roster's cost, or infeasible.
///
/// The derived order is the comparison order used throughout: cheaper
/// feasible costs first, `Infeasible` after every feasible cost, and
/// `Infeasible` equal to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedCost {
    Feasible(u32),
    Infeasible,
}

impl ExtendedCost {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ExtendedCost::Feasible(_))
    }

    pub fn cost(&self) -> Option<u32> {
        match *self {
            ExtendedCost::Feasible(c) => Some(c),
            ExtendedCost::Infeasible => None,
        }
    }
}

impl fmt::Display for ExtendedCost {
    /// The token used in results files: the cost digits, or `INF`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Feasible(c) => write!(f, "{c}"),
            ExtendedCost::Infeasible => f.write_str("INF"),
        }
    }
}

impl FromStr for ExtendedCost {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "INF" {
            return Ok(ExtendedCost::Infeasible);
        }
        s.parse::<u32>()
            .map(ExtendedCost::Feasible)
            .map_err(|_| format!("cost must be a nonnegative integer or INF, got {s:?}"))
    }
}

/// Maps a roster to the comparison domain: its cost if feasible, else infeasible.
pub fn extended_cost(inst: &ProblemInstance, roster: &Roster) -> ExtendedCost {
    if is_feasible(inst, roster) {
        ExtendedCost::Feasible(roster_cost(inst, roster))
    } else {
        ExtendedCost::Infeasible
    }
}

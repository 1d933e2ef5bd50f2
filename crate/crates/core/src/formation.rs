//! Coalition formation game over base station clusters.
//!
//! Players are users. A player's utility is its long-term throughput, zeroed
//! when its current coalition is one it has already left or when it has run
//! past its communication budget. Players take turns; on its turn a player
//! ranks the coalitions it would strictly gain from joining (its acceptable
//! coalitions), asks them in that order and moves to the first one whose
//! members all weakly gain. Every request costs one unit of budget.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::partitions::{Coalition, CoalitionStructure};
use crate::rate_model::{PrelogMode, RateContext};
use crate::{Error, Result, SeedStream};

/// Per-player bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlayerState {
    /// Coalitions this player has left.
    pub history: Vec<Coalition>,
    /// Join requests made so far (η).
    pub comm_count: u32,
    /// Communication budget (b).
    pub budget: u32,
}

impl PlayerState {
    /// Empty history, no requests made.
    pub fn new(budget: u32) -> Self {
        Self {
            history: Vec::new(),
            comm_count: 0,
            budget,
        }
    }

    /// `η ≤ b`.
    pub fn within_budget(&self) -> bool {
        self.comm_count <= self.budget
    }

    /// Whether `coalition` was left before.
    pub fn has_left(&self, coalition: Coalition) -> bool {
        self.history.contains(&coalition)
    }
}

/// Order in which players take their turns within a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VisitOrder {
    /// `0, 1, …, K-1` every pass.
    #[default]
    Ascending,
    /// A fresh permutation per pass drawn from the given stream.
    Shuffled(SeedStream),
}

/// Parameters of a formation run.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationConfig {
    /// Per-player budgets; `None` gives every player a budget of `K`.
    pub budgets: Option<Vec<u32>>,
    /// Starting structure; `None` starts from the grand coalition.
    pub initial: Option<CoalitionStructure>,
    /// Turn order.
    pub order: VisitOrder,
    /// Pre-log convention inside the utilities.
    ///
    /// With [`PrelogMode::Clamped`], every structure whose overhead exceeds
    /// the coherence block is worth zero to everyone, so no single move out
    /// of such a structure is a strict improvement. The signed pre-log keeps
    /// those structures ordered by how far they overshoot.
    pub prelog: PrelogMode,
}

impl Default for FormationConfig {
    fn default() -> Self {
        Self {
            budgets: None,
            initial: None,
            order: VisitOrder::Ascending,
            prelog: PrelogMode::Signed,
        }
    }
}

/// One join request.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttemptRecord {
    /// Player-visit counter (increments once per turn).
    pub visit: usize,
    /// Pass number, from zero.
    pub pass: usize,
    /// Deviating player.
    pub deviator: usize,
    /// Coalition the deviator was in.
    pub source: Coalition,
    /// Requested coalition; empty for going alone.
    pub target: Coalition,
    /// Deviator's restricted utility before the move.
    pub utility_before: f64,
    /// Deviator's restricted utility after the move.
    pub utility_after: f64,
    /// Whether the move was admissible and carried out.
    pub accepted: bool,
}

/// Everything that happened during a run.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FormationTrace {
    /// Join requests in order.
    pub records: Vec<AttemptRecord>,
    /// Accepted deviations.
    pub deviations: usize,
    /// Join requests made by each player.
    pub attempts: Vec<u32>,
    /// Completed passes over all players.
    pub passes: usize,
    /// Player turns taken.
    pub visits: usize,
}

impl FormationTrace {
    /// Total join requests.
    pub fn total_attempts(&self) -> u64 {
        self.attempts.iter().map(|&a| u64::from(a)).sum()
    }
}

/// Result of [`run_formation`].
#[derive(Debug, Clone, PartialEq)]
pub struct FormationOutcome {
    /// Final coalition structure.
    pub structure: CoalitionStructure,
    /// Run log.
    pub trace: FormationTrace,
    /// Final player states.
    pub states: Vec<PlayerState>,
}

/// A candidate move with the deviator's utility after it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Coalition to join; `None` means going alone.
    pub target: Option<Coalition>,
    /// Structure after the move.
    pub structure: CoalitionStructure,
    /// Deviator's restricted utility in `structure`.
    pub utility: f64,
}

/// Restricted utility: `t_k(S)` unless `Π_k(S)` was left before or the
/// budget is exceeded, in which case zero.
pub fn restricted_utility(
    user: usize,
    structure: &CoalitionStructure,
    state: &PlayerState,
    ctx: &RateContext,
    mode: PrelogMode,
) -> Result<f64> {
    let coalition = structure.coalition_of(user)?;
    if state.has_left(coalition) || !state.within_budget() {
        return Ok(0.0);
    }
    ctx.user_throughput(structure, user, mode)
}

/// All targets other than the player's own coalition: the other blocks in
/// canonical order, then going alone unless already alone.
fn targets(structure: &CoalitionStructure, user: usize) -> Result<Vec<Option<Coalition>>> {
    let own = structure.coalition_of(user)?;
    let mut out: Vec<Option<Coalition>> = structure
        .blocks()
        .iter()
        .copied()
        .filter(|&b| b != own)
        .map(Some)
        .collect();
    if own.len() > 1 {
        out.push(None);
    }
    Ok(out)
}

/// Acceptable coalitions: targets that strictly raise the player's restricted
/// utility, best first (ties keep canonical target order).
pub fn acceptable_coalitions(
    user: usize,
    structure: &CoalitionStructure,
    states: &[PlayerState],
    ctx: &RateContext,
    mode: PrelogMode,
) -> Result<Vec<Candidate>> {
    let state = player(states, user)?;
    let current = restricted_utility(user, structure, state, ctx, mode)?;
    let mut out = Vec::new();
    for target in targets(structure, user)? {
        let moved = structure.move_user(user, target)?;
        let utility = restricted_utility(user, &moved, state, ctx, mode)?;
        if utility > current {
            out.push(Candidate {
                target,
                structure: moved,
                utility,
            });
        }
    }
    out.sort_by(|a, b| b.utility.total_cmp(&a.utility));
    Ok(out)
}

fn player(states: &[PlayerState], user: usize) -> Result<&PlayerState> {
    states.get(user).ok_or(Error::UnknownUser {
        user,
        num_users: states.len(),
    })
}

/// Whether `user` moving to `target` is admissible: the mover strictly
/// gains and every member of `target` weakly gains.
pub fn is_admissible(
    user: usize,
    target: Option<Coalition>,
    structure: &CoalitionStructure,
    states: &[PlayerState],
    ctx: &RateContext,
    mode: PrelogMode,
) -> Result<bool> {
    let moved = structure.move_user(user, target)?;
    admissible_move(user, target, structure, &moved, states, ctx, mode)
}

fn admissible_move(
    user: usize,
    target: Option<Coalition>,
    structure: &CoalitionStructure,
    moved: &CoalitionStructure,
    states: &[PlayerState],
    ctx: &RateContext,
    mode: PrelogMode,
) -> Result<bool> {
    let mover = player(states, user)?;
    if restricted_utility(user, moved, mover, ctx, mode)?
        <= restricted_utility(user, structure, mover, ctx, mode)?
    {
        return Ok(false);
    }
    for member in target.unwrap_or(Coalition::EMPTY).members() {
        let state = player(states, member)?;
        let after = restricted_utility(member, moved, state, ctx, mode)?;
        let before = restricted_utility(member, structure, state, ctx, mode)?;
        if after < before {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether no player has an admissible deviation.
pub fn is_individually_stable(
    structure: &CoalitionStructure,
    states: &[PlayerState],
    ctx: &RateContext,
    mode: PrelogMode,
) -> Result<bool> {
    for user in 0..structure.num_users() {
        for target in targets(structure, user)? {
            if is_admissible(user, target, structure, states, ctx, mode)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Run the coalition formation algorithm to an individually stable structure.
///
/// Passes repeat until one completes with no deviation and no player
/// crossing its budget; a player that exhausts its budget stops valuing its
/// coalition, which can make an earlier-rejected request acceptable.
pub fn run_formation(ctx: &RateContext, config: &FormationConfig) -> Result<FormationOutcome> {
    let k = ctx.num_users();
    let budgets: Vec<u32> = match &config.budgets {
        Some(b) if b.len() != k => {
            return Err(Error::Config(format!("{} budgets given for {k} users", b.len())));
        }
        Some(b) => b.clone(),
        None => alloc::vec![k as u32; k],
    };
    let mut structure = match &config.initial {
        Some(s) if s.num_users() != k => {
            return Err(Error::Config(format!(
                "initial structure has {} users, expected {k}",
                s.num_users()
            )));
        }
        Some(s) => s.clone(),
        None => CoalitionStructure::grand(k),
    };
    let mode = config.prelog;
    let mut states: Vec<PlayerState> = budgets.iter().map(|&b| PlayerState::new(b)).collect();
    let mut trace = FormationTrace {
        attempts: alloc::vec![0; k],
        ..FormationTrace::default()
    };
    let mut order: Vec<usize> = (0..k).collect();
    let mut shuffle_rng = match config.order {
        VisitOrder::Shuffled(seed) => Some(seed.rng()),
        VisitOrder::Ascending => None,
    };

    loop {
        if let Some(rng) = shuffle_rng.as_mut() {
            order.shuffle(rng);
        }
        let exhausted_before: Vec<bool> = states.iter().map(|s| !s.within_budget()).collect();
        let mut deviated = false;
        for &user in &order {
            let visit = trace.visits;
            trace.visits += 1;
            let candidates = acceptable_coalitions(user, &structure, &states, ctx, mode)?;
            let source = structure.coalition_of(user)?;
            for cand in candidates {
                states[user].comm_count += 1;
                trace.attempts[user] += 1;
                let before = restricted_utility(user, &structure, &states[user], ctx, mode)?;
                let after = restricted_utility(user, &cand.structure, &states[user], ctx, mode)?;
                let accepted =
                    admissible_move(user, cand.target, &structure, &cand.structure, &states, ctx, mode)?;
                trace.records.push(AttemptRecord {
                    visit,
                    pass: trace.passes,
                    deviator: user,
                    source,
                    target: cand.target.unwrap_or(Coalition::EMPTY),
                    utility_before: before,
                    utility_after: after,
                    accepted,
                });
                if accepted {
                    states[user].history.push(source);
                    structure = cand.structure;
                    trace.deviations += 1;
                    deviated = true;
                    break;
                }
            }
        }
        trace.passes += 1;
        let budget_changed = states
            .iter()
            .zip(&exhausted_before)
            .any(|(s, &was)| was != !s.within_budget());
        if !deviated && !budget_changed {
            break;
        }
    }
    Ok(FormationOutcome {
        structure,
        trace,
        states,
    })
}

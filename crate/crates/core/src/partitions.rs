//! Coalition structures: canonical set partitions of the users `0..K`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

/// Largest supported number of users (coalitions are 64-bit masks).
pub const MAX_USERS: usize = 64;
/// Default cap for exhaustive enumeration (Bell(12) ≈ 4.2M).
pub const ENUMERATION_CAP: usize = 12;
/// Largest `K` whose Bell number fits in a `u64`.
pub const BELL_CAP: usize = 25;

/// A set of users, stored as a bitmask.
///
/// The empty coalition only appears as a deviation target.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coalition(u64);

impl Coalition {
    /// No members.
    pub const EMPTY: Coalition = Coalition(0);

    /// `{user}`.
    pub fn singleton(user: usize) -> Self {
        Self(1u64 << user)
    }

    /// Raw mask.
    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    /// Raw mask.
    pub fn bits(self) -> u64 {
        self.0
    }

    /// `true` for the empty set.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Number of members.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Membership test.
    pub fn contains(self, user: usize) -> bool {
        user < MAX_USERS && self.0 & (1u64 << user) != 0
    }

    /// Smallest member.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// `self ∪ {user}`.
    #[must_use]
    pub fn with(self, user: usize) -> Self {
        Self(self.0 | (1u64 << user))
    }

    /// `self \ {user}`.
    #[must_use]
    pub fn without(self, user: usize) -> Self {
        Self(self.0 & !(1u64 << user))
    }

    /// `self ∪ other`.
    #[must_use]
    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    /// Members in increasing order.
    pub fn members(self) -> Members {
        Members(self.0)
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Coalition::EMPTY, Coalition::with)
    }
}

/// Iterator over the members of a [`Coalition`].
#[derive(Debug, Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A partition of the users `0..K` into nonempty, disjoint coalitions.
///
/// Blocks are kept sorted by their smallest member, so two structures are
/// equal exactly when they describe the same partition.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoalitionStructure {
    num_users: usize,
    blocks: Vec<Coalition>,
}

impl CoalitionStructure {
    /// Validate and canonicalize.
    pub fn new(num_users: usize, mut blocks: Vec<Coalition>) -> Result<Self> {
        if num_users == 0 || num_users > MAX_USERS {
            return Err(Error::InvalidStructure(format!(
                "num_users must be in 1..={MAX_USERS}, got {num_users}"
            )));
        }
        let mut seen = 0u64;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidStructure("empty block".into()));
            }
            if seen & b.bits() != 0 {
                return Err(Error::InvalidStructure(format!(
                    "block {b} overlaps another block"
                )));
            }
            seen |= b.bits();
        }
        if seen != full_mask(num_users) {
            return Err(Error::InvalidStructure(format!(
                "blocks do not cover exactly the users 1..={num_users}"
            )));
        }
        blocks.sort_unstable_by_key(|b| b.min());
        Ok(Self { num_users, blocks })
    }

    /// Build from block labels (`labels[k]` = block of user `k`; any integers).
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut blocks: Vec<(usize, Coalition)> = Vec::new();
        for (user, &label) in labels.iter().enumerate() {
            match blocks.iter_mut().find(|(l, _)| *l == label) {
                Some((_, c)) => *c = c.with(user),
                None => blocks.push((label, Coalition::singleton(user))),
            }
        }
        Self::new(labels.len(), blocks.into_iter().map(|(_, c)| c).collect())
    }

    /// `{ {0, …, K-1} }`.
    pub fn grand(num_users: usize) -> Self {
        assert!((1..=MAX_USERS).contains(&num_users), "num_users out of range");
        Self {
            num_users,
            blocks: vec![Coalition(full_mask(num_users))],
        }
    }

    /// `{ {0}, {1}, …, {K-1} }`.
    pub fn singletons(num_users: usize) -> Self {
        assert!((1..=MAX_USERS).contains(&num_users), "num_users out of range");
        Self {
            num_users,
            blocks: (0..num_users).map(Coalition::singleton).collect(),
        }
    }

    /// Number of users `K`.
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Coalitions in canonical order.
    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    /// Number of coalitions.
    pub fn num_coalitions(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the largest coalition.
    pub fn max_coalition_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// The coalition containing `user`.
    pub fn coalition_of(&self, user: usize) -> Result<Coalition> {
        self.blocks
            .iter()
            .copied()
            .find(|b| b.contains(user))
            .ok_or(Error::UnknownUser {
                user,
                num_users: self.num_users,
            })
    }

    /// Block label of every user, numbered in canonical block order
    /// (a restricted growth string).
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.num_users];
        for (i, b) in self.blocks.iter().enumerate() {
            for m in b.members() {
                labels[m] = i;
            }
        }
        labels
    }

    /// `user` leaves its coalition and joins `target` (`None`: a new singleton).
    ///
    /// The source block disappears if it becomes empty; leaving a singleton
    /// for `None` returns an equal structure.
    pub fn move_user(&self, user: usize, target: Option<Coalition>) -> Result<Self> {
        let source = self.coalition_of(user)?;
        let mut blocks = Vec::with_capacity(self.blocks.len() + 1);
        match target {
            Some(t) if t.contains(user) => {
                return Err(Error::InvalidTarget(format!(
                    "{t} already contains user {}",
                    user + 1
                )));
            }
            Some(t) if !self.blocks.contains(&t) => {
                return Err(Error::InvalidTarget(format!("{t} is not a coalition of {self}")));
            }
            _ => {}
        }
        for &b in &self.blocks {
            if b == source {
                let rest = b.without(user);
                if !rest.is_empty() {
                    blocks.push(rest);
                }
            } else if Some(b) == target {
                blocks.push(b.with(user));
            } else {
                blocks.push(b);
            }
        }
        if target.is_none() {
            blocks.push(Coalition::singleton(user));
        }
        blocks.sort_unstable_by_key(|b| b.min());
        Ok(Self {
            num_users: self.num_users,
            blocks,
        })
    }

    /// Re-check the partition invariants.
    pub fn validate(&self) -> Result<()> {
        let canonical = Self::new(self.num_users, self.blocks.clone())?;
        if canonical.blocks != self.blocks {
            return Err(Error::InvalidStructure("blocks not in canonical order".into()));
        }
        Ok(())
    }
}

fn full_mask(num_users: usize) -> u64 {
    if num_users >= 64 {
        u64::MAX
    } else {
        (1u64 << num_users) - 1
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CoalitionStructure {
    type Err = Error;

    /// Parse the `{1,3}|{2}` form (one-based users).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidStructure(format!("cannot parse {s:?}: {msg}"));
        let mut blocks = Vec::new();
        let mut count = 0usize;
        for part in s.split('|') {
            let inner = part
                .trim()
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(|| bad(format!("block {part:?} is not braced")))?;
            let mut block = Coalition::EMPTY;
            for tok in inner.split(',') {
                let user: usize = tok.trim().parse().map_err(|_| bad(format!("bad user {tok:?}")))?;
                if user == 0 || user > MAX_USERS {
                    return Err(bad(format!("user {user} out of range")));
                }
                if block.contains(user - 1) {
                    return Err(bad(format!("user {user} repeated")));
                }
                block = block.with(user - 1);
                count += 1;
            }
            blocks.push(block);
        }
        Self::new(count, blocks)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for CoalitionStructure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for CoalitionStructure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Iterator over every partition of `0..K`, in restricted-growth-string order.
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = CoalitionStructure;

    fn next(&mut self) -> Option<CoalitionStructure> {
        if self.done {
            return None;
        }
        let current =
            CoalitionStructure::from_labels(&self.labels).expect("restricted growth strings are partitions");
        // Advance: bump the rightmost position that may still grow, zero the tail.
        let n = self.labels.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.labels[i - 1]);
        }
        match (1..n).rev().find(|&i| self.labels[i] <= prefix_max[i]) {
            Some(i) => {
                self.labels[i] += 1;
                self.labels[i + 1..].iter_mut().for_each(|l| *l = 0);
            }
            None => self.done = true,
        }
        Some(current)
    }
}

/// Every partition of `num_users` users, up to [`ENUMERATION_CAP`].
pub fn enumerate_partitions(num_users: usize) -> Result<Partitions> {
    enumerate_partitions_capped(num_users, ENUMERATION_CAP)
}

/// Every partition of `num_users` users, refusing sizes above `cap`.
pub fn enumerate_partitions_capped(num_users: usize, cap: usize) -> Result<Partitions> {
    if num_users > cap.min(MAX_USERS) {
        return Err(Error::CapExceeded {
            what: "partition enumeration",
            cap,
            requested: num_users,
        });
    }
    if num_users == 0 {
        return Err(Error::InvalidStructure("cannot partition zero users".into()));
    }
    Ok(Partitions {
        labels: vec![0; num_users],
        done: false,
    })
}

/// Bell number `B(n)` via the Bell triangle, exact for `n <= 25`.
pub fn bell_number(n: usize) -> Result<u64> {
    if n > BELL_CAP {
        return Err(Error::CapExceeded {
            what: "bell_number",
            cap: BELL_CAP,
            requested: n,
        });
    }
    // The last row also holds B(n+1), so work in u128.
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("rows are nonempty"));
        for &v in &row {
            let sum = next.last().expect("pushed above") + v;
            next.push(sum);
        }
        row = next;
    }
    u64::try_from(row[0]).map_err(|_| Error::CapExceeded {
        what: "bell_number",
        cap: BELL_CAP,
        requested: n,
    })
}

/// Sample a partition uniformly over all `B(K)` partitions.
///
/// Draws a restricted growth string position by position; each choice is
/// weighted by the number of completions it leaves open.
pub fn random_partition<R: Rng + ?Sized>(num_users: usize, rng: &mut R) -> CoalitionStructure {
    assert!((1..=MAX_USERS).contains(&num_users), "num_users out of range");
    // completions[r][m]: strings of length r extendable after a prefix with m blocks.
    let n = num_users;
    let mut completions = vec![vec![0.0f64; n + 2]; n];
    completions[0].iter_mut().for_each(|c| *c = 1.0);
    for r in 1..n {
        for m in 1..=n {
            completions[r][m] = m as f64 * completions[r - 1][m] + completions[r - 1][m + 1];
        }
    }
    let mut labels = vec![0usize; n];
    let mut blocks = 1usize;
    for (i, label) in labels.iter_mut().enumerate().skip(1) {
        let remaining = n - i - 1;
        let stay = completions[remaining][blocks];
        let open = completions[remaining][blocks + 1];
        let u = rng.random::<f64>() * (blocks as f64 * stay + open);
        if u < blocks as f64 * stay {
            *label = ((u / stay) as usize).min(blocks - 1);
        } else {
            *label = blocks;
            blocks += 1;
        }
    }
    CoalitionStructure::from_labels(&labels).expect("restricted growth strings are partitions")
}

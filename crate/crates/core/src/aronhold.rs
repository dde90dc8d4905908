//! Fundamental systems, Aronhold sets and the 8×8 characteristic table.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::characteristic::{is_azygetic, Characteristic, CharacteristicError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AronholdError {
    #[error("member {0} is not odd")]
    EvenMember(Characteristic),
    #[error("member {0} is repeated")]
    RepeatedMember(Characteristic),
    #[error("triple ({0}, {1}, {2}) is syzygetic")]
    SyzygeticTriple(Characteristic, Characteristic, Characteristic),
    #[error("member index {0} out of range 0..7")]
    IndexOutOfRange(usize),
    #[error("table parse error at row {row}: {reason}")]
    TableParse { row: usize, reason: String },
    #[error(transparent)]
    Characteristic(#[from] CharacteristicError),
}

/// True iff the 8 characteristics are distinct and every triple is azygetic.
pub fn is_fundamental_system(chars: &[Characteristic]) -> bool {
    if chars.len() != 8 {
        return false;
    }
    let distinct: BTreeSet<_> = chars.iter().collect();
    if distinct.len() != 8 {
        return false;
    }
    all_triples_azygetic(chars)
}

fn all_triples_azygetic(chars: &[Characteristic]) -> bool {
    let n = chars.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !is_azygetic(chars[i], chars[j], chars[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Seven odd characteristics with all triples azygetic, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AronholdSet {
    members: [Characteristic; 7],
    base: Characteristic,
}

impl AronholdSet {
    pub fn new(members: [Characteristic; 7]) -> Result<Self, AronholdError> {
        for (i, &m) in members.iter().enumerate() {
            if !m.is_odd() {
                return Err(AronholdError::EvenMember(m));
            }
            if members[..i].contains(&m) {
                return Err(AronholdError::RepeatedMember(m));
            }
        }
        for i in 0..7 {
            for j in i + 1..7 {
                for k in j + 1..7 {
                    let (a, b, c) = (members[i], members[j], members[k]);
                    if !is_azygetic(a, b, c) {
                        return Err(AronholdError::SyzygeticTriple(a, b, c));
                    }
                }
            }
        }
        let base = members
            .iter()
            .fold(Characteristic::ZERO, |acc, &m| acc + m);
        Ok(AronholdSet { members, base })
    }

    /// The base-zero set `{77, 64, 51, 46, 23, 15, 32}` in that order; its
    /// table is the layout of the bitangent matrix.
    pub fn reference() -> Self {
        let labels = [77, 64, 51, 46, 23, 15, 32];
        AronholdSet::new(labels.map(Characteristic::lab)).expect("reference set is valid")
    }

    pub fn members(&self) -> &[Characteristic; 7] {
        &self.members
    }

    pub fn base(&self) -> Characteristic {
        self.base
    }

    pub fn member_set(&self) -> BTreeSet<Characteristic> {
        self.members.iter().copied().collect()
    }

    /// Members sorted ascending by label.
    pub fn canonical(&self) -> AronholdSet {
        let mut members = self.members;
        members.sort();
        AronholdSet {
            members,
            base: self.base,
        }
    }

    /// Translates the fundamental system `m0, n1..n7` by `m0 + n_i`.
    ///
    /// The even element of the translate is again `m0` (the image of `n_i`),
    /// and the odd part is `n_i` followed by `(m0 + n_i) + n_j` for `j != i`,
    /// which is row `i + 1` of the characteristic table.
    pub fn translate(&self, i: usize) -> Result<AronholdSet, AronholdError> {
        if i >= 7 {
            return Err(AronholdError::IndexOutOfRange(i));
        }
        let shift = self.base + self.members[i];
        let mut members = [self.members[i]; 7];
        let mut slot = 1;
        for (j, &n) in self.members.iter().enumerate() {
            if j != i {
                members[slot] = n + shift;
                slot += 1;
            }
        }
        AronholdSet::new(members)
    }
}

impl fmt::Display for AronholdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<_> = self.members.iter().map(|m| m.label_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// All 288 Aronhold sets, canonically ordered, found by exhaustive search
/// over 7-subsets of the odd characteristics with azygetic pruning.
pub fn enumerate_aronhold_sets() -> Vec<AronholdSet> {
    let odds: Vec<Characteristic> = Characteristic::odds().collect();
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(7);
    extend(&odds, 0, &mut stack, &mut out);
    out
}

fn extend(
    odds: &[Characteristic],
    start: usize,
    chosen: &mut Vec<Characteristic>,
    out: &mut Vec<AronholdSet>,
) {
    if chosen.len() == 7 {
        let members: [Characteristic; 7] = chosen.as_slice().try_into().unwrap();
        out.push(AronholdSet::new(members).expect("pruned search yields valid sets"));
        return;
    }
    for idx in start..odds.len() {
        let cand = odds[idx];
        let ok = (0..chosen.len()).all(|i| {
            (i + 1..chosen.len()).all(|j| is_azygetic(chosen[i], chosen[j], cand))
        });
        if ok {
            chosen.push(cand);
            extend(odds, idx + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// Symmetric 8×8 table with `entry(0,0) = m0`, `entry(0,k) = n_k` and
/// `entry(i,k) = (m0 + n_i) + n_k`; rows and columns are indexed by
/// `m0, n1..n7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharMatrix {
    entries: [[Characteristic; 8]; 8],
}

impl CharMatrix {
    pub fn new(set: &AronholdSet) -> Self {
        let m0 = set.base();
        let mut v = [m0; 8];
        v[1..].copy_from_slice(set.members());
        let mut entries = [[m0; 8]; 8];
        for i in 0..8 {
            for k in 0..8 {
                entries[i][k] = m0 + v[i] + v[k];
            }
        }
        CharMatrix { entries }
    }

    pub fn from_entries(entries: [[Characteristic; 8]; 8]) -> Self {
        CharMatrix { entries }
    }

    pub fn entry(&self, i: usize, k: usize) -> Characteristic {
        self.entries[i][k]
    }

    pub fn entries(&self) -> &[[Characteristic; 8]; 8] {
        &self.entries
    }

    pub fn base(&self) -> Characteristic {
        self.entries[0][0]
    }

    /// The 28 entries strictly above the diagonal, row by row.
    pub fn off_diagonal(&self) -> Vec<(usize, usize, Characteristic)> {
        let mut out = Vec::with_capacity(28);
        for i in 0..8 {
            for k in i + 1..8 {
                out.push((i, k, self.entries[i][k]));
            }
        }
        out
    }

    /// Position `(i, k)`, `i < k`, holding the odd characteristic `n`.
    pub fn position_of(&self, n: Characteristic) -> Option<(usize, usize)> {
        self.off_diagonal()
            .into_iter()
            .find(|&(_, _, c)| c == n)
            .map(|(i, k, _)| (i, k))
    }

    /// Off-diagonal entries of row `i`, in column order.
    pub fn row_members(&self, i: usize) -> [Characteristic; 7] {
        let mut out = [self.entries[i][0]; 7];
        let mut slot = 0;
        for k in 0..8 {
            if k != i {
                out[slot] = self.entries[i][k];
                slot += 1;
            }
        }
        out
    }

    /// Equality up to a simultaneous permutation of rows and columns.
    pub fn equivalent_to(&self, other: &CharMatrix) -> bool {
        if self.base() != other.base() {
            return false;
        }
        // Row i of a table is determined by its set of off-diagonal members.
        let row_set = |m: &CharMatrix, i: usize| -> BTreeSet<Characteristic> {
            m.row_members(i).into_iter().collect()
        };
        let mut perm = [usize::MAX; 8];
        for (i, p) in perm.iter_mut().enumerate() {
            let target = row_set(self, i);
            match (0..8).find(|&j| row_set(other, j) == target) {
                Some(j) => *p = j,
                None => return false,
            }
        }
        (0..8).all(|i| (0..8).all(|k| self.entries[i][k] == other.entries[perm[i]][perm[k]]))
    }

    /// Parses a table of 8 rows × 8 bracket-form characteristics. Blank
    /// lines and lines starting with `#` are skipped; entries may be
    /// separated by whitespace or `&`.
    pub fn parse_table(text: &str) -> Result<CharMatrix, AronholdError> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = rows.len();
            let cells: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == '&')
                .filter(|s| !s.is_empty())
                .collect();
            if cells.len() != 8 {
                return Err(AronholdError::TableParse {
                    row,
                    reason: format!("expected 8 entries, found {}", cells.len()),
                });
            }
            let mut parsed = [Characteristic::ZERO; 8];
            for (p, cell) in parsed.iter_mut().zip(cells) {
                *p = cell.parse()?;
            }
            rows.push(parsed);
            if rows.len() > 8 {
                return Err(AronholdError::TableParse {
                    row,
                    reason: "more than 8 rows".into(),
                });
            }
        }
        let entries: [[Characteristic; 8]; 8] =
            rows.try_into().map_err(|r: Vec<_>| AronholdError::TableParse {
                row: r.len(),
                reason: "expected 8 rows".into(),
            })?;
        Ok(CharMatrix { entries })
    }
}

impl fmt::Display for CharMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The printed table for the reference set, as shipped in `data/`.
pub const REFERENCE_TABLE: &str = include_str!("../data/reference_char_matrix.txt");

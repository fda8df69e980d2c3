//! Constructive division by two: given `E = M ⊔ N` with a bijection
//! `φ: M → N`, `E' = P ⊔ Q` with `ψ: P → Q`, and a bijection `α: E → E'`,
//! produce a bijection `M → Q` as a finite join of pieces, each piece an
//! explicit composition word in `α, φ, ψ` and their inverses restricted to
//! sets.
//!
//! The graph on `E ⊔ E'` whose edges are the two matchings and `α` is a
//! disjoint union of cycles; each cycle carries equally many `M`- and
//! `Q`-vertices, which are paired off non-crossingly and connected by the
//! path between them along the cycle. The related idempotent property
//! check (`e₁ ⊥ e₂`, `e₁ D e₂`, `f₁ ⊥ f₂`, `f₁ D f₂`, joins D-related
//! forces `e₁ D f₂`) is verified exhaustively on a finite monoid.

use serde::{Deserialize, Serialize};

use crate::bim::FiniteBIM;
use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection, SubsetIdempotent};

/// Input data: both `E` and `E'` are copies of `0..ground.size()`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KuratowskiInstance {
    pub ground: GroundSet,
    /// `M ⊆ E`; `N` is its complement.
    pub m_part: SubsetIdempotent,
    /// Bijection `M → N`.
    pub phi: PartialBijection,
    /// `P ⊆ E'`; `Q` is its complement.
    pub p_part: SubsetIdempotent,
    /// Bijection `P → Q`.
    pub psi: PartialBijection,
    /// Bijection `E → E'` (total on the ground set).
    pub alpha: PartialBijection,
}

impl KuratowskiInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.ground;
        for (name, part) in [("M", &self.m_part), ("P", &self.p_part)] {
            if part.ground() != n {
                return Err(Error::PartitionMismatch(format!("{name} on wrong ground")));
            }
        }
        for (name, map, dom, cod) in [
            ("phi", &self.phi, self.m_part, self.m_part.complement()),
            ("psi", &self.psi, self.p_part, self.p_part.complement()),
            (
                "alpha",
                &self.alpha,
                SubsetIdempotent::top(n),
                SubsetIdempotent::top(n),
            ),
        ] {
            if map.ground() != n {
                return Err(Error::PartitionMismatch(format!("{name} on wrong ground")));
            }
            if map.domain() != dom || map.range() != cod {
                return Err(Error::NotBijective(format!(
                    "{name} is not a bijection between the required parts"
                )));
            }
        }
        Ok(())
    }

    pub fn q_part(&self) -> SubsetIdempotent {
        self.p_part.complement()
    }
}

/// One step of a composition word, applied left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Letter {
    Alpha,
    AlphaInv,
    Phi,
    PhiInv,
    Psi,
    PsiInv,
}

/// Which of the two copies of the ground set a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    Left,
    Right,
}

/// Evaluate a composition word on a point of `E`, tracking which space the
/// intermediate values live in. Returns the final point, which for the
/// emitted words lies in `Q ⊆ E'`.
pub fn evaluate_word(inst: &KuratowskiInstance, word: &[Letter], start: usize) -> Option<usize> {
    let mut space = Space::Left;
    let mut x = start;
    for letter in word {
        match (letter, space) {
            (Letter::Alpha, Space::Left) => {
                x = inst.alpha.apply(x)?;
                space = Space::Right;
            }
            (Letter::AlphaInv, Space::Right) => {
                x = inst.alpha.preimage(x)?;
                space = Space::Left;
            }
            (Letter::Phi, Space::Left) => x = inst.phi.apply(x)?,
            (Letter::PhiInv, Space::Left) => x = inst.phi.preimage(x)?,
            (Letter::Psi, Space::Right) => x = inst.psi.apply(x)?,
            (Letter::PsiInv, Space::Right) => x = inst.psi.preimage(x)?,
            _ => return None, // ill-typed word
        }
    }
    match space {
        Space::Right => Some(x),
        Space::Left => None,
    }
}

/// A restriction of one composition word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuratowskiPiece {
    pub word: Vec<Letter>,
    /// Partial bijection from a subset of `M` (in `E`) to a subset of `Q`
    /// (in `E'`).
    pub map: PartialBijection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuratowskiDecomposition {
    /// The assembled bijection `M → Q`.
    pub bijection: PartialBijection,
    pub pieces: Vec<KuratowskiPiece>,
}

/// Construct the bijection `M → Q` by chasing the alternating cycles of
/// the matchings `φ̂`, `ψ̂` and the edge relation `α`.
pub fn kuratowski_bijection(inst: &KuratowskiInstance) -> Result<KuratowskiDecomposition> {
    inst.validate()?;
    let n = inst.ground.size();
    let q_part = inst.q_part();

    // vertex encoding: 0..n is E, n..2n is E'
    let matching_step = |v: usize| -> (usize, Letter) {
        if v < n {
            if inst.m_part.contains(v) {
                (inst.phi.apply(v).expect("phi total on M"), Letter::Phi)
            } else {
                (inst.phi.preimage(v).expect("phi onto N"), Letter::PhiInv)
            }
        } else {
            let y = v - n;
            if inst.p_part.contains(y) {
                (n + inst.psi.apply(y).expect("psi total on P"), Letter::Psi)
            } else {
                (n + inst.psi.preimage(y).expect("psi onto Q"), Letter::PsiInv)
            }
        }
    };
    let alpha_step = |v: usize| -> (usize, Letter) {
        if v < n {
            (n + inst.alpha.apply(v).expect("alpha total"), Letter::Alpha)
        } else {
            (
                inst.alpha.preimage(v - n).expect("alpha onto"),
                Letter::AlphaInv,
            )
        }
    };

    let mut visited = vec![false; 2 * n];
    let mut assignments: Vec<(usize, usize, Vec<Letter>)> = Vec::new();

    for start in 0..2 * n {
        if visited[start] {
            continue;
        }
        // walk the cycle, alternating alpha-type and matching edges,
        // starting with alpha
        let mut cycle_vertices = vec![start];
        let mut arrival_letters: Vec<Letter> = Vec::new();
        visited[start] = true;
        let mut current = start;
        let mut use_alpha = true;
        loop {
            let (next, letter) = if use_alpha {
                alpha_step(current)
            } else {
                matching_step(current)
            };
            use_alpha = !use_alpha;
            arrival_letters.push(letter);
            if next == start {
                break;
            }
            visited[next] = true;
            cycle_vertices.push(next);
            current = next;
        }
        let len = cycle_vertices.len();

        // special vertices: sources in M (left), targets in Q (right)
        #[derive(Clone, Copy, PartialEq)]
        enum Kind {
            Source,
            Target,
        }
        let mut specials: Vec<(usize, Kind)> = Vec::new();
        for (pos, &v) in cycle_vertices.iter().enumerate() {
            if v < n && inst.m_part.contains(v) {
                specials.push((pos, Kind::Source));
            } else if v >= n && q_part.contains(v - n) {
                specials.push((pos, Kind::Target));
            }
        }
        let sources = specials.iter().filter(|s| s.1 == Kind::Source).count();
        if sources * 2 != specials.len() {
            return Err(Error::InternalInvariantViolation(
                "cycle carries unequal source and target counts".into(),
            ));
        }

        // non-crossing pairing: repeatedly match a source whose next
        // unmatched special (cyclically) is a target
        let k = specials.len();
        let mut matched = vec![false; k];
        let mut remaining = sources;
        while remaining > 0 {
            let mut progressed = false;
            for i in 0..k {
                if matched[i] || specials[i].1 != Kind::Source {
                    continue;
                }
                let mut j = (i + 1) % k;
                while matched[j] {
                    j = (j + 1) % k;
                }
                if specials[j].1 != Kind::Target {
                    continue;
                }
                matched[i] = true;
                matched[j] = true;
                remaining -= 1;
                progressed = true;
                let (from_pos, to_pos) = (specials[i].0, specials[j].0);
                // letters along the forward path from from_pos to to_pos
                let mut word = Vec::new();
                let mut pos = from_pos;
                while pos != to_pos {
                    word.push(arrival_letters[pos]); // arrival at pos+1
                    pos = (pos + 1) % len;
                }
                let source_point = cycle_vertices[from_pos];
                let target_point = cycle_vertices[to_pos] - n;
                assignments.push((source_point, target_point, word));
            }
            if !progressed {
                return Err(Error::InternalInvariantViolation(
                    "non-crossing pairing stalled".into(),
                ));
            }
        }
    }

    // group single-point assignments by word
    let mut by_word: std::collections::BTreeMap<Vec<Letter>, Vec<(usize, usize)>> =
        std::collections::BTreeMap::new();
    for (x, y, word) in assignments {
        by_word.entry(word).or_default().push((x, y));
    }
    let mut pieces = Vec::new();
    let mut all_pairs = Vec::new();
    for (word, graph) in by_word {
        all_pairs.extend(graph.iter().copied());
        pieces.push(KuratowskiPiece {
            map: PartialBijection::new(inst.ground, graph)?,
            word,
        });
    }
    let bijection = PartialBijection::new(inst.ground, all_pairs)?;
    if bijection.domain() != inst.m_part || bijection.range() != q_part {
        return Err(Error::InternalInvariantViolation(
            "assembled map is not a bijection from M to Q".into(),
        ));
    }
    Ok(KuratowskiDecomposition { bijection, pieces })
}

/// Check, over all orthogonal D-pairs of idempotents, that `e₁ ⊥ e₂`,
/// `e₁ D e₂`, `f₁ ⊥ f₂`, `f₁ D f₂`, and `(e₁ ∨ e₂) D (f₁ ∨ f₂)` force
/// `e₁ D f₂`.
pub fn check_kuratowski_property(monoid: &FiniteBIM) -> Result<bool> {
    let idempotents = monoid.idempotents()?;
    let mut halves: Vec<(SubsetIdempotent, SubsetIdempotent, SubsetIdempotent)> = Vec::new();
    for e1 in &idempotents {
        for e2 in &idempotents {
            if e1.disjoint(e2)? && monoid.d_related(e1, e2)?.is_some() {
                halves.push((*e1, *e2, e1.join(e2)?));
            }
        }
    }
    for (e1, _e2, ejoin) in &halves {
        for (_f1, f2, fjoin) in &halves {
            if monoid.d_related(ejoin, fjoin)?.is_some()
                && monoid.d_related(e1, f2)?.is_none()
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

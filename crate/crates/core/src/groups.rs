//! Finite groups given by generators: cyclic groups `Z/n` and `SL(2, Z/q)`,
//! their quotient towers, Cayley graphs and character tables.
//!
//! Elements are stored in a canonical sorted order and addressed by index;
//! that order is the vertex order of the Cayley graph and the column order
//! of character files.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graphs::{Graph, SpaceOfGraphs};

/// Largest group accepted at construction.
pub const MAX_GROUP_ORDER: u64 = 20_000;

/// Margulis generators of `SL(2, Z)` reduced mod `q`, as `[a, b, c, d]` rows.
pub const MARGULIS_GENERATORS: [[i64; 4]; 2] = [[1, 2, 0, 1], [1, 0, 2, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    Residue(u64),
    /// `[[a, b], [c, d]]` stored row-major.
    Matrix([u64; 4]),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Residue(r) => write!(f, "{r}"),
            GroupElement::Matrix([a, b, c, d]) => write!(f, "[{a},{b};{c},{d}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Cyclic { n: u64 },
    Sl2 { q: u64 },
}

impl GroupKind {
    pub fn modulus(self) -> u64 {
        match self {
            GroupKind::Cyclic { n } => n,
            GroupKind::Sl2 { q } => q,
        }
    }
}

/// A generating letter: its label and the element it denotes.
#[derive(Debug, Clone, PartialEq)]
pub struct Letter {
    pub label: String,
    pub element: usize,
}

#[derive(Clone)]
pub struct FiniteGroup {
    kind: GroupKind,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    identity: usize,
    letters: Vec<Letter>,
    generators: Vec<usize>,
    pathologies: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("kind", &self.kind)
            .field("order", &self.order())
            .field("generators", &self.generators.len())
            .finish()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `|SL(2, Z/q)| = q^3 ∏_{p | q} (1 - 1/p^2)`.
pub fn sl2_order(q: u64) -> u64 {
    let mut order = q * q * q;
    for p in prime_factors(q) {
        order = order / (p * p) * (p * p - 1);
    }
    order
}

fn mat_mul(x: [u64; 4], y: [u64; 4], q: u64) -> [u64; 4] {
    [
        (x[0] * y[0] + x[1] * y[2]) % q,
        (x[0] * y[1] + x[1] * y[3]) % q,
        (x[2] * y[0] + x[3] * y[2]) % q,
        (x[2] * y[1] + x[3] * y[3]) % q,
    ]
}

fn mat_inv(x: [u64; 4], q: u64) -> [u64; 4] {
    // det = 1, so the inverse is the adjugate
    [x[3], (q - x[1]) % q, (q - x[2]) % q, x[0]]
}

impl FiniteGroup {
    /// `Z/n` with the letters `+1, -1`.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::cyclic_with_steps(n, &[1])
    }

    /// `Z/n` with letters `+s, -s` for each step `s`.
    pub fn cyclic_with_steps(n: u64, steps: &[i64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadModulus {
                modulus: n,
                reason: "cyclic groups need n >= 2".into(),
            });
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: n,
                limit: MAX_GROUP_ORDER,
            });
        }
        let elements: Vec<_> = (0..n).map(GroupElement::Residue).collect();
        let mut raw = Vec::new();
        for &s in steps {
            let r = s.rem_euclid(n as i64) as u64;
            raw.push((format!("+{s}"), GroupElement::Residue(r)));
            raw.push((format!("-{s}"), GroupElement::Residue((n - r) % n)));
        }
        Self::assemble(GroupKind::Cyclic { n }, elements, raw)
    }

    /// `SL(2, Z/q)` with the Margulis letters `a, a^-1, b, b^-1`.
    pub fn sl2(q: u64) -> Result<Self> {
        Self::sl2_with_generators(q, &MARGULIS_GENERATORS)
    }

    /// `SL(2, Z/q)` for odd `q >= 3`, generated by the given integer
    /// matrices (row-major) and their inverses. The group is enumerated by
    /// closure from the identity and must exhaust `SL(2, Z/q)`.
    pub fn sl2_with_generators(q: u64, generators: &[[i64; 4]]) -> Result<Self> {
        if q < 3 || q % 2 == 0 {
            return Err(Error::BadModulus {
                modulus: q,
                reason: "need odd q >= 3 so that 2 is invertible".into(),
            });
        }
        let expected = sl2_order(q);
        if expected > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: expected,
                limit: MAX_GROUP_ORDER,
            });
        }
        let mut raw = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            let m = g.map(|v| v.rem_euclid(q as i64) as u64);
            let det = (m[0] * m[3] + q * q - (m[1] * m[2]) % q) % q;
            if det != 1 {
                return Err(Error::InvalidGenerator(format!("generator {i} has determinant {det} mod {q}")));
            }
            let name = if generators.len() <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{i}")
            };
            raw.push((name.clone(), GroupElement::Matrix(m)));
            raw.push((format!("{name}^-1"), GroupElement::Matrix(mat_inv(m, q))));
        }

        let mut seen: HashMap<[u64; 4], ()> = HashMap::new();
        let identity = [1, 0, 0, 1];
        seen.insert(identity, ());
        let mut queue = VecDeque::from([identity]);
        let mats: Vec<[u64; 4]> = raw
            .iter()
            .map(|(_, e)| match e {
                GroupElement::Matrix(m) => *m,
                GroupElement::Residue(_) => unreachable!(),
            })
            .collect();
        while let Some(x) = queue.pop_front() {
            for &s in &mats {
                let y = mat_mul(x, s, q);
                if seen.insert(y, ()).is_none() {
                    queue.push_back(y);
                }
            }
        }
        if seen.len() as u64 != expected {
            return Err(Error::NotGenerating {
                reached: seen.len(),
                expected: expected as usize,
            });
        }
        let mut elements: Vec<_> = seen.into_keys().map(GroupElement::Matrix).collect();
        elements.sort_unstable();
        Self::assemble(GroupKind::Sl2 { q }, elements, raw)
    }

    fn assemble(kind: GroupKind, elements: Vec<GroupElement>, raw: Vec<(String, GroupElement)>) -> Result<Self> {
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let identity = index[&Self::identity_of(kind)];
        let mut letters = Vec::with_capacity(raw.len());
        let mut pathologies = Vec::new();
        let mut generators = Vec::new();
        for (label, e) in raw {
            let element = index[&e];
            if element == identity {
                pathologies.push(format!("letter {label} is the identity"));
            } else if let Some(prev) = letters.iter().find(|l: &&Letter| l.element == element) {
                pathologies.push(format!("letters {} and {label} coincide", prev.label));
            } else {
                generators.push(element);
            }
            letters.push(Letter { label, element });
        }
        let group = FiniteGroup {
            kind,
            elements,
            index,
            identity,
            letters,
            generators,
            pathologies,
        };
        if let GroupKind::Cyclic { .. } = kind {
            let reached = group.reachable_count();
            if reached != group.order() {
                return Err(Error::NotGenerating {
                    reached,
                    expected: group.order(),
                });
            }
        }
        Ok(group)
    }

    fn identity_of(kind: GroupKind) -> GroupElement {
        match kind {
            GroupKind::Cyclic { .. } => GroupElement::Residue(0),
            GroupKind::Sl2 { .. } => GroupElement::Matrix([1, 0, 0, 1]),
        }
    }

    fn reachable_count(&self) -> usize {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &s in &self.generators {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> GroupElement {
        self.elements[i]
    }

    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// The letters in the order they were given, including degenerate ones.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Distinct non-identity letter images: the Cayley generating set.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Short words of length at most two that collapse in this quotient:
    /// letters equal to the identity and coinciding letters. Empty exactly
    /// when `(S ∪ S²) ∩ kernel = {e}` for the free group on the letters.
    pub fn pathologies(&self) -> &[String] {
        &self.pathologies
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        let z = match (self.elements[x], self.elements[y], self.kind) {
            (GroupElement::Residue(a), GroupElement::Residue(b), GroupKind::Cyclic { n }) => GroupElement::Residue((a + b) % n),
            (GroupElement::Matrix(a), GroupElement::Matrix(b), GroupKind::Sl2 { q }) => GroupElement::Matrix(mat_mul(a, b, q)),
            _ => unreachable!("mixed element encodings"),
        };
        self.index[&z]
    }

    pub fn inv(&self, x: usize) -> usize {
        let z = match (self.elements[x], self.kind) {
            (GroupElement::Residue(a), GroupKind::Cyclic { n }) => GroupElement::Residue((n - a) % n),
            (GroupElement::Matrix(a), GroupKind::Sl2 { q }) => GroupElement::Matrix(mat_inv(a, q)),
            _ => unreachable!("mixed element encodings"),
        };
        self.index[&z]
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|&s| self.generators.iter().all(|&t| self.mul(s, t) == self.mul(t, s)))
    }

    /// Right Cayley graph: `g ~ g·s` for `s` in the generating set.
    pub fn cayley_graph(&self) -> Result<Graph> {
        if self.generators.is_empty() {
            return Err(Error::NotGenerating {
                reached: 1,
                expected: self.order(),
            });
        }
        for &s in &self.generators {
            if !self.generators.contains(&self.inv(s)) {
                return Err(Error::InvalidGenerator(format!(
                    "generating set is not symmetric at {}",
                    self.elements[s]
                )));
            }
        }
        let adjacency: Vec<Vec<usize>> = (0..self.order())
            .map(|g| {
                let mut nbrs: Vec<usize> = self.generators.iter().map(|&s| self.mul(g, s)).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                nbrs
            })
            .collect();
        let g = Graph::from_adjacency_unchecked(adjacency);
        let labels = self.elements.iter().map(ToString::to_string).collect();
        Ok(g.with_labels(labels))
    }

    /// Reduction onto a quotient of the same kind whose modulus divides ours.
    pub fn reduction_to(&self, target: &FiniteGroup) -> Result<Homomorphism> {
        let (from, to) = (self.kind.modulus(), target.kind.modulus());
        let same_kind = matches!(
            (self.kind, target.kind),
            (GroupKind::Cyclic { .. }, GroupKind::Cyclic { .. }) | (GroupKind::Sl2 { .. }, GroupKind::Sl2 { .. })
        );
        if !same_kind || from % to != 0 {
            return Err(Error::IncomparableLevels { from, to });
        }
        let map: Vec<usize> = self
            .elements
            .iter()
            .map(|e| {
                let r = match *e {
                    GroupElement::Residue(a) => GroupElement::Residue(a % to),
                    GroupElement::Matrix(m) => GroupElement::Matrix(m.map(|v| v % to)),
                };
                target.index[&r]
            })
            .collect();
        let kernel = (0..self.order()).filter(|&i| map[i] == target.identity).collect();
        Ok(Homomorphism {
            from_modulus: from,
            to_modulus: to,
            map,
            kernel,
        })
    }
}

/// A reduction homomorphism between two levels, by element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    pub from_modulus: u64,
    pub to_modulus: u64,
    /// Image of each source element.
    pub map: Vec<usize>,
    /// Source elements mapping to the identity, ascending.
    pub kernel: Vec<usize>,
}

impl Homomorphism {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self, target_order: usize) -> bool {
        let mut hit = vec![false; target_order];
        self.map.iter().for_each(|&y| hit[y] = true);
        hit.into_iter().all(|h| h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerKind {
    Cyclic,
    Sl2,
}

/// Levels `base · ratio^k`, `k = 0..levels`, of a cyclic or `SL(2)` tower.
#[derive(Debug, Clone)]
pub struct QuotientTower {
    kind: TowerKind,
    moduli: Vec<u64>,
    levels: Vec<FiniteGroup>,
}

impl QuotientTower {
    pub fn cyclic(base: u64, ratio: u64, levels: usize) -> Result<Self> {
        Self::build(TowerKind::Cyclic, base, ratio, levels)
    }

    pub fn sl2(base: u64, ratio: u64, levels: usize) -> Result<Self> {
        Self::build(TowerKind::Sl2, base, ratio, levels)
    }

    pub fn build(kind: TowerKind, base: u64, ratio: u64, levels: usize) -> Result<Self> {
        if ratio < 2 || levels == 0 {
            return Err(Error::BadModulus {
                modulus: base,
                reason: format!("tower needs ratio >= 2 and at least one level (ratio {ratio}, levels {levels})"),
            });
        }
        let mut moduli = Vec::with_capacity(levels);
        let mut m = base;
        for _ in 0..levels {
            moduli.push(m);
            m = m.checked_mul(ratio).ok_or(Error::GroupTooLarge {
                order: u64::MAX,
                limit: MAX_GROUP_ORDER,
            })?;
        }
        let levels = moduli
            .iter()
            .map(|&q| match kind {
                TowerKind::Cyclic => FiniteGroup::cyclic(q),
                TowerKind::Sl2 => FiniteGroup::sl2(q),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuotientTower { kind, moduli, levels })
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn level(&self, k: usize) -> &FiniteGroup {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[FiniteGroup] {
        &self.levels
    }

    /// The Cayley graphs of the levels as a space of graphs.
    pub fn space_of_graphs(&self) -> Result<SpaceOfGraphs> {
        SpaceOfGraphs::new(self.levels.iter().map(FiniteGroup::cayley_graph).collect::<Result<Vec<_>>>()?)
    }

    /// Reduction from level `from` onto level `to`; requires `to ≤ from`.
    pub fn reduction(&self, from: usize, to: usize) -> Result<Homomorphism> {
        let (a, b) = (self.moduli[from], self.moduli[to]);
        if to > from {
            return Err(Error::IncomparableLevels { from: a, to: b });
        }
        self.levels[from].reduction_to(&self.levels[to])
    }
}

/// One irreducible character: its dimension and values in element order.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl Character {
    /// `χ ∘ h`, a character of the source group of `h`.
    pub fn pull_back(&self, h: &Homomorphism) -> Character {
        Character {
            dim: self.dim,
            values: h.map.iter().map(|&y| self.values[y]).collect(),
        }
    }

    /// The character `ψ` of the target of the surjection `h` with
    /// `χ = ψ ∘ h`, if `χ` factors through `h`: that is, if `χ(k) = dim`
    /// on the kernel of `h`.
    pub fn push_forward(&self, h: &Homomorphism, target_order: usize) -> Option<Character> {
        let dim = Complex64::new(self.dim as f64, 0.0);
        if h.kernel.iter().any(|&k| (self.values[k] - dim).norm() > CHARACTER_TOLERANCE) {
            return None;
        }
        let mut values = vec![None; target_order];
        for (x, &y) in h.map.iter().enumerate() {
            values[y].get_or_insert(self.values[x]);
        }
        Some(Character {
            dim: self.dim,
            values: values.into_iter().collect::<Option<_>>()?,
        })
    }
}

/// Tolerance for table validation.
pub const CHARACTER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    group_order: usize,
    characters: Vec<Character>,
}

impl CharacterTable {
    /// `χ_j(g) = exp(2πi·j·g/n)` for a cyclic group; other groups are
    /// rejected unless abelian (none of the supported non-cyclic kinds is).
    pub fn abelian_characters(g: &FiniteGroup) -> Result<Self> {
        let n = match g.kind() {
            GroupKind::Cyclic { n } => n,
            GroupKind::Sl2 { .. } => return Err(Error::NonAbelianGroup),
        };
        let characters = (0..n)
            .map(|j| Character {
                dim: 1,
                values: g
                    .elements()
                    .iter()
                    .map(|e| match *e {
                        GroupElement::Residue(r) => Complex64::from_polar(1.0, 2.0 * PI * ((j * r) % n) as f64 / n as f64),
                        GroupElement::Matrix(_) => unreachable!(),
                    })
                    .collect(),
            })
            .collect();
        let table = CharacterTable {
            group_order: n as usize,
            characters,
        };
        table.validate(g.identity())?;
        Ok(table)
    }

    /// Builds and validates a table against the identity index of its group.
    pub fn new(group_order: usize, characters: Vec<Character>, identity: usize) -> Result<Self> {
        for (i, c) in characters.iter().enumerate() {
            if c.values.len() != group_order {
                return Err(Error::InvalidCharacter(format!(
                    "character {i} has {} values, expected {group_order}",
                    c.values.len()
                )));
            }
        }
        let table = CharacterTable { group_order, characters };
        table.validate(identity)?;
        Ok(table)
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    pub fn character(&self, i: usize) -> &Character {
        &self.characters[i]
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// Worst deviation from `Σ_g χ_σ(g) conj(χ_τ(g)) = |G| δ_στ`, normalized by `|G|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.group_order as f64;
        let mut worst: f64 = 0.0;
        for (s, cs) in self.characters.iter().enumerate() {
            for (t, ct) in self.characters.iter().enumerate().skip(s) {
                let sum: Complex64 = cs.values.iter().zip(&ct.values).map(|(a, b)| a * b.conj()).sum();
                let target = if s == t { n } else { 0.0 };
                worst = worst.max((sum - target).norm() / n);
            }
        }
        worst
    }

    fn validate(&self, identity: usize) -> Result<()> {
        for (i, c) in self.characters.iter().enumerate() {
            if (c.values[identity] - c.dim as f64).norm() > CHARACTER_TOLERANCE {
                return Err(Error::InvalidCharacter(format!(
                    "character {i} has value {} at the identity but dimension {}",
                    c.values[identity], c.dim
                )));
            }
        }
        let residual = self.orthogonality_residual();
        if residual > CHARACTER_TOLERANCE {
            return Err(Error::OrthogonalityFailure { residual });
        }
        let dim_sq: usize = self.characters.iter().map(|c| c.dim * c.dim).sum();
        if dim_sq != self.group_order {
            return Err(Error::OrthogonalityFailure {
                residual: (dim_sq as f64 - self.group_order as f64).abs() / self.group_order as f64,
            });
        }
        Ok(())
    }

    /// Parses the character file format for the given group.
    pub fn load(text: &str, group: &FiniteGroup) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing group_order header".into(),
        })?;
        let order: usize = header
            .strip_prefix("group_order")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `group_order N`, found `{header}`"),
            })?;
        if order != group.order() {
            return Err(Error::InvalidCharacter(format!(
                "file is for a group of order {order}, group has order {}",
                group.order()
            )));
        }
        let mut characters = Vec::new();
        for (line, text) in lines {
            let mut parts = text.split_whitespace();
            if parts.next() != Some("dim") {
                return Err(Error::Parse {
                    line,
                    message: "expected a `dim d ...` row".into(),
                });
            }
            let dim = parts.next().and_then(|d| d.parse().ok()).ok_or_else(|| Error::Parse {
                line,
                message: "missing or bad dimension".into(),
            })?;
            let values = parts
                .map(|v| {
                    parse_complex(v).ok_or_else(|| Error::Parse {
                        line,
                        message: format!("bad complex value `{v}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            characters.push(Character { dim, values });
        }
        CharacterTable::new(order, characters, group.identity())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group_order {}\n", self.group_order);
        for c in &self.characters {
            out.push_str(&format!("dim {}", c.dim));
            for v in &c.values {
                out.push(' ');
                out.push_str(&format_complex(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Formats as `a+bi` / `a-bi` with round-trip precision.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Parses `a+bi`, `a-bi`, `a`, or `bi` (exponents allowed).
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let bytes = s.as_bytes();
    if let Some(body) = s.strip_suffix('i') {
        let split = (1..body.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match split {
            Some(k) => {
                let re = body[..k].parse().ok()?;
                let im_str = &body[k..];
                let im = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => im_str.parse().ok()?,
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    _ => body.parse().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        };
    }
    s.parse().ok().map(|re| Complex64::new(re, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle_graph, Girth};

    #[test]
    fn cyclic_cayley_is_cycle() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert_eq!(g.cayley_graph().unwrap().edges(), cycle_graph(5).unwrap().edges());
        let g6 = FiniteGroup::cyclic(6).unwrap().cayley_graph().unwrap();
        assert_eq!(g6.edges(), cycle_graph(6).unwrap().edges());
    }

    #[test]
    fn circulant_girth() {
        for n in 5..12 {
            let g = FiniteGroup::cyclic_with_steps(n, &[1, 2]).unwrap().cayley_graph().unwrap();
            assert_eq!(g.regular_degree(), Some(4));
            assert_eq!(g.girth(), Girth::Cycle(3));
        }
    }

    #[test]
    fn sl2_orders() {
        assert_eq!(sl2_order(3), 24);
        assert_eq!(sl2_order(5), 120);
        assert_eq!(sl2_order(9), 648);
        assert_eq!(sl2_order(15), 2880);
        let g = FiniteGroup::sl2(3).unwrap();
        assert_eq!(g.order(), 24);
        let g = FiniteGroup::sl2(5).unwrap();
        assert_eq!(g.order(), 120);
        let cay = g.cayley_graph().unwrap();
        assert_eq!(cay.vertex_count(), 120);
        assert_eq!(cay.regular_degree(), Some(4));
        assert!(g.pathologies().is_empty());
    }

    #[test]
    fn sl2_rejects() {
        assert!(matches!(FiniteGroup::sl2(6), Err(Error::BadModulus { modulus: 6, .. })));
        assert!(matches!(FiniteGroup::sl2(31), Err(Error::GroupTooLarge { .. })));
        // upper unipotents alone generate a cyclic subgroup
        assert!(matches!(
            FiniteGroup::sl2_with_generators(5, &[[1, 1, 0, 1]]),
            Err(Error::NotGenerating { reached: 5, expected: 120 })
        ));
        assert!(matches!(
            FiniteGroup::sl2_with_generators(5, &[[2, 0, 0, 2]]),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn group_axioms_small() {
        let g = FiniteGroup::sl2(3).unwrap();
        let e = g.identity();
        for x in 0..g.order() {
            assert_eq!(g.mul(x, g.inv(x)), e);
            assert_eq!(g.mul(e, x), x);
            for y in 0..g.order() {
                for z in [0, 5, 17] {
                    assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn cyclic_reduction_kernel() {
        let t = QuotientTower::cyclic(3, 2, 3).unwrap();
        assert_eq!(t.moduli(), &[3, 6, 12]);
        let h = t.reduction(2, 1).unwrap();
        let kernel: Vec<_> = h.kernel.iter().map(|&i| t.level(2).element(i)).collect();
        assert_eq!(kernel, vec![GroupElement::Residue(0), GroupElement::Residue(6)]);
        assert!(h.is_surjective(6));
        assert!(matches!(t.reduction(1, 2), Err(Error::IncomparableLevels { from: 6, to: 12 })));
        let z5 = FiniteGroup::cyclic(5).unwrap();
        assert!(matches!(t.level(2).reduction_to(&z5), Err(Error::IncomparableLevels { from: 12, to: 5 })));
    }

    #[test]
    fn sl2_reduction() {
        let t = QuotientTower::sl2(3, 3, 2).unwrap();
        let h = t.reduction(1, 0).unwrap();
        assert_eq!(h.kernel.len(), 648 / 24);
        assert!(h.is_surjective(24));
        let (up, down) = (t.level(1), t.level(0));
        for (lu, ld) in up.letters().iter().zip(down.letters()) {
            assert_eq!(h.apply(lu.element), ld.element);
        }
        for x in (0..up.order()).step_by(7) {
            for y in (0..up.order()).step_by(11) {
                assert_eq!(h.apply(up.mul(x, y)), down.mul(h.apply(x), h.apply(y)));
            }
        }
    }

    #[test]
    fn pathologies_flagged() {
        // in Z/4, +2 and -2 coincide
        let g = FiniteGroup::cyclic_with_steps(4, &[1, 2]).unwrap();
        assert_eq!(g.pathologies().len(), 1);
        assert_eq!(g.cayley_graph().unwrap().regular_degree(), Some(3));
        // in Z/2, +1 and -1 coincide
        assert_eq!(FiniteGroup::cyclic(2).unwrap().pathologies().len(), 1);
        assert!(FiniteGroup::cyclic(3).unwrap().pathologies().is_empty());
    }

    #[test]
    fn abelian_tables() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let t = CharacterTable::abelian_characters(&z3).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((t.character(1).values[1] - w).norm() < 1e-15);
        assert!((t.character(1).values[2] - w * w).norm() < 1e-15);
        let z8 = FiniteGroup::cyclic(8).unwrap();
        assert!(CharacterTable::abelian_characters(&z8).unwrap().orthogonality_residual() < 1e-12);
        let sl = FiniteGroup::sl2(3).unwrap();
        assert_eq!(CharacterTable::abelian_characters(&sl), Err(Error::NonAbelianGroup));
        assert!(!sl.is_abelian());
    }

    #[test]
    fn bad_tables_rejected() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let trivial = Character {
            dim: 1,
            values: vec![Complex64::new(1.0, 0.0); 3],
        };
        // orthonormal but incomplete: Σ dim² = 1 ≠ 3
        assert!(matches!(
            CharacterTable::new(3, vec![trivial.clone()], z3.identity()),
            Err(Error::OrthogonalityFailure { .. })
        ));
        assert!(matches!(
            CharacterTable::new(3, vec![trivial.clone(), trivial], z3.identity()),
            Err(Error::OrthogonalityFailure { .. })
        ));
    }

    #[test]
    fn table_text_roundtrip() {
        let z6 = FiniteGroup::cyclic(6).unwrap();
        let t = CharacterTable::abelian_characters(&z6).unwrap();
        assert_eq!(CharacterTable::load(&t.to_text(), &z6).unwrap(), t);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5-2i"), Some(Complex64::new(1.5, -2.0)));
        assert_eq!(parse_complex("-1e-3+4.0i"), Some(Complex64::new(-1e-3, 4.0)));
        assert_eq!(parse_complex("3"), Some(Complex64::new(3.0, 0.0)));
        assert_eq!(parse_complex("-i"), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_complex("2.5e2i"), Some(Complex64::new(0.0, 250.0)));
        assert_eq!(parse_complex("x+yi"), None);
    }
}

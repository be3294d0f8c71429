//! Finite security lattices.
//!
//! A [`LatticeSpec`] is built from a set of named elements and a list of
//! Hasse edges. The order is the reflexive-transitive closure of the edges,
//! and join/meet tables are precomputed for every pair. Construction fails
//! unless every pair has a unique least upper bound and a unique greatest
//! lower bound; the lattice is never repaired silently.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of an element inside one particular [`LatticeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) const fn from_index(i: usize) -> Elem {
        Elem(i as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid element name `{0}`")]
    InvalidName(String),
    #[error("lattice has no elements")]
    Empty,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("edge mentions undeclared element `{0}`")]
    UnknownElementInEdge(String),
    #[error("order is not antisymmetric: cycle through `{0}`")]
    CycleDetected(String),
    #[error("no unique least element")]
    NoBottom,
    #[error("`{0}` and `{1}` have no unique least upper bound")]
    NoUniqueJoin(String, String),
    #[error("`{0}` and `{1}` have no unique greatest lower bound")]
    NoUniqueMeet(String, String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown builtin lattice `{0}`")]
    UnknownBuiltin(String),
}

/// Layout of a lattice whose elements are the strings `{L,H}^n` ordered
/// componentwise. Character `i` of an element name is principal `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductShape {
    arity: usize,
    masks: Vec<u8>,
    by_mask: Vec<Elem>,
}

impl ProductShape {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Bit `i` is set iff principal `i` is `H` in `e`.
    pub fn mask(&self, e: Elem) -> u8 {
        self.masks[e.index()]
    }

    pub fn elem(&self, mask: u8) -> Elem {
        self.by_mask[mask as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    names: Vec<String>,
    index: HashMap<String, Elem>,
    order: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    bottom: Elem,
    product: Option<ProductShape>,
}

/// Element names are `[A-Za-z][A-Za-z0-9_']*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl LatticeSpec {
    /// Builds and validates a lattice from element names and Hasse edges
    /// `(a, b)` meaning `a ⊏ b`.
    ///
    /// Checks run in a fixed order: names, edges, antisymmetry, bottom,
    /// meets, joins. Pairs are scanned as `(i, j)` with `i < j` in
    /// declaration order and the first failing pair is reported.
    pub fn from_hasse<S: AsRef<str>>(names: &[S], edges: &[(S, S)]) -> Result<LatticeSpec, LatticeError> {
        if names.is_empty() {
            return Err(LatticeError::Empty);
        }
        let mut index = HashMap::new();
        let mut owned = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if !is_valid_name(name) {
                return Err(LatticeError::InvalidName(name.to_string()));
            }
            if index.insert(name.to_string(), Elem(i as u32)).is_some() {
                return Err(LatticeError::DuplicateElement(name.to_string()));
            }
            owned.push(name.to_string());
        }
        let n = owned.len();
        let mut order = vec![false; n * n];
        for i in 0..n {
            order[i * n + i] = true;
        }
        for (a, b) in edges {
            let lookup = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| LatticeError::UnknownElementInEdge(s.to_string()))
            };
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if a == b {
                return Err(LatticeError::CycleDetected(owned[a.index()].clone()));
            }
            order[a.index() * n + b.index()] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if !order[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if order[k * n + j] {
                        order[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if order[i * n + j] && order[j * n + i] {
                    return Err(LatticeError::CycleDetected(owned[i].clone()));
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| order[b * n + x]))
            .ok_or(LatticeError::NoBottom)?;

        let up_count: Vec<usize> = (0..n).map(|c| (0..n).filter(|&x| order[c * n + x]).count()).collect();
        let down_count: Vec<usize> = (0..n).map(|c| (0..n).filter(|&x| order[x * n + c]).count()).collect();

        let mut meet = vec![Elem(0); n * n];
        for i in 0..n {
            for j in i..n {
                let lower: Vec<usize> = (0..n).filter(|&c| order[c * n + i] && order[c * n + j]).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .max_by_key(|&c| down_count[c])
                    .filter(|&c| lower.iter().all(|&l| order[l * n + c]))
                    .ok_or_else(|| LatticeError::NoUniqueMeet(owned[i].clone(), owned[j].clone()))?;
                meet[i * n + j] = Elem(glb as u32);
                meet[j * n + i] = Elem(glb as u32);
            }
        }

        // The least upper bound of a pair is the upper bound whose own
        // up-set is the whole set of upper bounds, i.e. the one with the
        // largest up-set, provided it is below every other upper bound.
        let mut join = vec![Elem(0); n * n];
        for i in 0..n {
            for j in i..n {
                let upper: Vec<usize> = (0..n).filter(|&c| order[i * n + c] && order[j * n + c]).collect();
                let lub = upper
                    .iter()
                    .copied()
                    .max_by_key(|&c| up_count[c])
                    .filter(|&c| upper.iter().all(|&u| order[c * n + u]))
                    .ok_or_else(|| LatticeError::NoUniqueJoin(owned[i].clone(), owned[j].clone()))?;
                join[i * n + j] = Elem(lub as u32);
                join[j * n + i] = Elem(lub as u32);
            }
        }
        let mut spec = LatticeSpec {
            names: owned,
            index,
            order,
            join,
            meet,
            bottom: Elem(bottom as u32),
            product: None,
        };
        spec.product = spec.detect_product();
        Ok(spec)
    }

    fn detect_product(&self) -> Option<ProductShape> {
        let arity = self.names[0].len();
        if arity == 0 || arity > 8 || self.names.len() != 1 << arity {
            return None;
        }
        let mut masks = Vec::with_capacity(self.names.len());
        let mut by_mask = vec![None; 1 << arity];
        for (i, name) in self.names.iter().enumerate() {
            if name.len() != arity {
                return None;
            }
            let mut mask = 0u8;
            for (bit, c) in name.bytes().enumerate() {
                match c {
                    b'L' => {}
                    b'H' => mask |= 1 << bit,
                    _ => return None,
                }
            }
            by_mask[mask as usize] = Some(Elem(i as u32));
            masks.push(mask);
        }
        let by_mask: Vec<Elem> = by_mask.into_iter().collect::<Option<_>>()?;
        let n = self.names.len();
        for a in 0..n {
            for b in 0..n {
                let componentwise = masks[a] & !masks[b] == 0;
                if self.order[a * n + b] != componentwise {
                    return None;
                }
            }
        }
        Some(ProductShape { arity, masks, by_mask })
    }

    /// Parses the line-oriented lattice file format:
    ///
    /// ```text
    /// # comment
    /// elem L
    /// elem H
    /// leq L H
    /// ```
    pub fn parse(text: &str) -> Result<LatticeSpec, LatticeError> {
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let syntax = |message: &str| LatticeError::Syntax {
                line: lineno + 1,
                message: message.to_string(),
            };
            match words.as_slice() {
                ["elem", name] => names.push(name.to_string()),
                ["leq", a, b] => edges.push((a.to_string(), b.to_string())),
                ["elem", ..] => return Err(syntax("expected `elem <name>`")),
                ["leq", ..] => return Err(syntax("expected `leq <a> <b>`")),
                [other, ..] => return Err(syntax(&format!("unknown directive `{other}`"))),
                [] => unreachable!(),
            }
        }
        LatticeSpec::from_hasse(&names, &edges)
    }

    /// Resolves one of the built-in lattices: `two_point`, `chain3`,
    /// `fig5` (the seven-element diamond-of-diamonds), or `powerset(n)`
    /// for `1 <= n <= 8`.
    pub fn builtin(name: &str) -> Result<LatticeSpec, LatticeError> {
        let unknown = || LatticeError::UnknownBuiltin(name.to_string());
        match name {
            "two_point" | "two-point" => Ok(Self::two_point()),
            "chain3" => Ok(Self::chain3()),
            "fig5" | "diamond7" => Ok(Self::fig5()),
            _ => {
                let arg = name
                    .strip_prefix("powerset(")
                    .and_then(|s| s.strip_suffix(')'))
                    .or_else(|| name.strip_prefix("powerset:"))
                    .ok_or_else(unknown)?;
                let n: usize = arg.trim().parse().map_err(|_| unknown())?;
                if !(1..=8).contains(&n) {
                    return Err(unknown());
                }
                Ok(Self::powerset(n))
            }
        }
    }

    pub fn two_point() -> LatticeSpec {
        Self::from_hasse(&["L", "H"], &[("L", "H")]).expect("two-point lattice")
    }

    pub fn chain3() -> LatticeSpec {
        Self::from_hasse(&["L", "M", "H"], &[("L", "M"), ("M", "H")]).expect("chain3")
    }

    pub fn fig5() -> LatticeSpec {
        Self::from_hasse(
            &["L", "L1", "L'", "L2", "M1", "M2", "H"],
            &[
                ("M1", "H"),
                ("M2", "H"),
                ("L1", "M1"),
                ("L'", "M1"),
                ("L'", "M2"),
                ("L2", "M2"),
                ("L", "L1"),
                ("L", "L'"),
                ("L", "L2"),
            ],
        )
        .expect("fig5 lattice")
    }

    /// `{L,H}^n` ordered componentwise; names list `L…L` first and count
    /// up in binary with the first character most significant.
    pub fn powerset(n: usize) -> LatticeSpec {
        assert!((1..=8).contains(&n), "powerset arity must be in 1..=8");
        let name = |m: usize| -> String {
            (0..n)
                .map(|i| if m & (1 << (n - 1 - i)) != 0 { 'H' } else { 'L' })
                .collect()
        };
        let names: Vec<String> = (0..1usize << n).map(name).collect();
        let mut edges = Vec::new();
        for m in 0..1usize << n {
            for bit in 0..n {
                if m & (1 << bit) == 0 {
                    edges.push((name(m), name(m | (1 << bit))));
                }
            }
        }
        Self::from_hasse(&names, &edges).expect("powerset lattice")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.names.len() as u32).map(Elem)
    }

    pub fn elem(&self, name: &str) -> Result<Elem, LatticeError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| LatticeError::UnknownElement(name.to_string()))
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.index()]
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    /// The greatest element, when one exists.
    pub fn top(&self) -> Option<Elem> {
        self.elements().find(|&t| self.elements().all(|x| self.leq(x, t)))
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.order[a.index() * self.len() + b.index()]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.index() * self.len() + b.index()]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.index() * self.len() + b.index()]
    }

    /// Name-based order query.
    pub fn leq_names(&self, a: &str, b: &str) -> Result<bool, LatticeError> {
        Ok(self.leq(self.elem(a)?, self.elem(b)?))
    }

    pub fn join_names(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.join(self.elem(a)?, self.elem(b)?)))
    }

    pub fn meet_names(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.meet(self.elem(a)?, self.elem(b)?)))
    }

    /// True for a two-element chain.
    pub fn is_two_point(&self) -> bool {
        self.len() == 2
    }

    pub fn product_shape(&self) -> Option<&ProductShape> {
        self.product.as_ref()
    }

    /// Checks the algebraic lattice laws over every pair and triple and
    /// returns a description of each failure.
    pub fn law_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = |e: Elem| self.name(e).to_string();
        for a in self.elements() {
            if self.join(a, a) != a || self.meet(a, a) != a {
                out.push(format!("idempotence fails at {}", n(a)));
            }
            if !self.leq(self.bottom, a) {
                out.push(format!("bottom not below {}", n(a)));
            }
            for b in self.elements() {
                if self.join(a, b) != self.join(b, a) || self.meet(a, b) != self.meet(b, a) {
                    out.push(format!("commutativity fails at ({}, {})", n(a), n(b)));
                }
                if self.join(a, self.meet(a, b)) != a || self.meet(a, self.join(a, b)) != a {
                    out.push(format!("absorption fails at ({}, {})", n(a), n(b)));
                }
                let le = self.leq(a, b);
                if le != (self.join(a, b) == b) || le != (self.meet(a, b) == a) {
                    out.push(format!("order/join/meet disagree at ({}, {})", n(a), n(b)));
                }
                for c in self.elements() {
                    if self.join(self.join(a, b), c) != self.join(a, self.join(b, c))
                        || self.meet(self.meet(a, b), c) != self.meet(a, self.meet(b, c))
                    {
                        out.push(format!("associativity fails at ({}, {}, {})", n(a), n(b), n(c)));
                    }
                }
            }
        }
        out
    }

    /// Renders the lattice in the file format accepted by [`parse`](Self::parse),
    /// listing covering edges only.
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(&format!("elem {name}\n"));
        }
        for a in self.elements() {
            for b in self.elements() {
                if a == b || !self.leq(a, b) {
                    continue;
                }
                let covered = self
                    .elements()
                    .any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if !covered {
                    out.push_str(&format!("leq {} {}\n", self.name(a), self.name(b)));
                }
            }
        }
        out
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

//! Group arithmetic backends and word-length windows.
//!
//! Every backend has a solvable word problem with unique canonical forms, so
//! element equality is equality of [`Element`] values. Infinite groups are only
//! ever enumerated through a [`Window`], the ball of radius `L` in the word
//! metric of the generating letters `S⁺ = {s₁, s₁⁻¹, s₂, s₂⁻¹, …}`.
//!
//! Conventions: `multiply(g, x)` appends `x` on the right, so the Cayley edge
//! `{g, gx}` joins `g` to `multiply(g, x)`. Permutation products apply the right
//! factor first: `(gh)(i) = g(h(i))`.

mod lattice;
mod subgroup;
mod table;
pub mod word;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use lattice::Lattice;
pub use subgroup::{
    all_subgroups, closure, coset_canonical, is_in_subgroup, CosetId, CosetTable, Membership,
    Subgroup,
};
pub use table::FiniteTable;
use word::{letter_generator, letter_is_inverse, Letter};

/// Default element-count limit for enumerations.
pub const DEFAULT_CAP: usize = 200_000;

/// Canonical form of a group element. The variant is fixed by the backend.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    /// Finite-table element index.
    Index(u32),
    /// Permutation as its image list on `0..degree`.
    Perm(Vec<u32>),
    /// Freely reduced word; `+(i+1)` is generator `i`, `-(i+1)` its inverse.
    Word(Vec<i32>),
    /// Free-product normal form: alternating `(factor, non-identity element)` syllables.
    Syllables(Vec<(u32, u32)>),
    /// Free abelian group coordinates.
    Vector(Vec<i64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    FiniteTable,
    Permutation,
    Free,
    FreeProduct,
    FreeAbelian,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupKind::FiniteTable => "finite-table",
            GroupKind::Permutation => "permutation",
            GroupKind::Free => "free",
            GroupKind::FreeProduct => "free-product",
            GroupKind::FreeAbelian => "free-abelian",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
enum Backend {
    Table(FiniteTable),
    Permutation { degree: usize },
    Free { rank: usize },
    FreeProduct { factors: Vec<FiniteTable> },
    FreeAbelian { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub element: Element,
}

/// A group together with its named generating set.
#[derive(Clone, Debug)]
pub struct Group {
    backend: Backend,
    generators: Vec<Generator>,
    names: Vec<String>,
    order: Option<usize>,
    /// Shortlex-least letter word of every table element (finite-table kind),
    /// or per factor of a free product.
    table_words: Vec<Vec<Vec<Letter>>>,
    /// First generator index of each free-product factor.
    factor_offsets: Vec<usize>,
}

impl Group {
    /// Finite group given by a multiplication table and generator indices.
    pub fn finite_table(table: FiniteTable, generators: Vec<(String, u32)>) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        word::validate_generator_names(&names)?;
        for (name, x) in &generators {
            if *x as usize >= table.order() {
                return Err(Error::invalid(format!(
                    "generator `{name}` = {x} outside the table"
                )));
            }
        }
        let gens: Vec<u32> = generators.iter().map(|g| g.1).collect();
        let words = table_words(&table, &gens, 0);
        if words.iter().any(Option::is_none) {
            return Err(Error::invalid(
                "table generators do not generate the whole table",
            ));
        }
        let order = table.order();
        Ok(Group {
            generators: generators
                .into_iter()
                .map(|(name, x)| Generator {
                    name,
                    element: Element::Index(x),
                })
                .collect(),
            names,
            order: Some(order),
            table_words: vec![words.into_iter().map(Option::unwrap).collect()],
            factor_offsets: vec![],
            backend: Backend::Table(table),
        })
    }

    /// The cyclic group `Z/n` generated by `1`.
    pub fn cyclic(n: usize, name: &str) -> Result<Self> {
        Group::finite_table(
            FiniteTable::cyclic(n)?,
            vec![(name.to_string(), u32::from(n > 1))],
        )
    }

    /// Permutation group on `0..degree` generated by the given image lists.
    pub fn permutation(degree: usize, generators: Vec<(String, Vec<u32>)>) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        word::validate_generator_names(&names)?;
        for (name, p) in &generators {
            if p.len() != degree {
                return Err(Error::invalid(format!(
                    "permutation `{name}` has {} images, expected degree {degree}",
                    p.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &x in p {
                if x as usize >= degree || std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::invalid(format!(
                        "`{name}` is not a permutation of 0..{degree}"
                    )));
                }
            }
        }
        let mut group = Group {
            backend: Backend::Permutation { degree },
            generators: generators
                .into_iter()
                .map(|(name, p)| Generator {
                    name,
                    element: Element::Perm(p),
                })
                .collect(),
            names,
            order: None,
            table_words: vec![],
            factor_offsets: vec![],
        };
        let full = group.ball(usize::MAX, DEFAULT_CAP)?;
        group.order = Some(full.len());
        Ok(group)
    }

    /// Free group on the given generator names (rank 0 is the trivial group).
    pub fn free(names: Vec<String>) -> Result<Self> {
        word::validate_generator_names(&names)?;
        let rank = names.len();
        Ok(Group {
            backend: Backend::Free { rank },
            generators: (0..rank)
                .map(|i| Generator {
                    name: names[i].clone(),
                    element: Element::Word(vec![i as i32 + 1]),
                })
                .collect(),
            names,
            order: if rank == 0 { Some(1) } else { None },
            table_words: vec![],
            factor_offsets: vec![],
        })
    }

    /// Free abelian group `Z^n` with the standard basis as generators.
    pub fn free_abelian(names: Vec<String>) -> Result<Self> {
        word::validate_generator_names(&names)?;
        let rank = names.len();
        Ok(Group {
            backend: Backend::FreeAbelian { rank },
            generators: (0..rank)
                .map(|i| {
                    let mut v = vec![0i64; rank];
                    v[i] = 1;
                    Generator {
                        name: names[i].clone(),
                        element: Element::Vector(v),
                    }
                })
                .collect(),
            names,
            order: if rank == 0 { Some(1) } else { None },
            table_words: vec![],
            factor_offsets: vec![],
        })
    }

    /// Free product of finite groups; each factor comes with its own generators.
    pub fn free_product(factors: Vec<(FiniteTable, Vec<(String, u32)>)>) -> Result<Self> {
        let names: Vec<String> = factors
            .iter()
            .flat_map(|(_, g)| g.iter().map(|(n, _)| n.clone()))
            .collect();
        word::validate_generator_names(&names)?;
        let mut generators = Vec::new();
        let mut table_words_all = Vec::new();
        let mut offsets = Vec::new();
        let mut tables = Vec::new();
        for (f, (table, gens)) in factors.into_iter().enumerate() {
            offsets.push(generators.len());
            let idx: Vec<u32> = gens.iter().map(|g| g.1).collect();
            for (name, x) in &gens {
                if *x as usize >= table.order() {
                    return Err(Error::invalid(format!(
                        "generator `{name}` = {x} outside factor {f}"
                    )));
                }
            }
            let words = table_words(&table, &idx, generators.len());
            if words.iter().any(Option::is_none) {
                return Err(Error::invalid(format!(
                    "factor {f} is not generated by its generators"
                )));
            }
            table_words_all.push(words.into_iter().map(Option::unwrap).collect());
            for (name, x) in gens {
                let element = if x == table.identity() {
                    Element::Syllables(vec![])
                } else {
                    Element::Syllables(vec![(f as u32, x)])
                };
                generators.push(Generator { name, element });
            }
            tables.push(table);
        }
        let nontrivial = tables.iter().filter(|t| t.order() > 1).count();
        let order = match nontrivial {
            0 => Some(1),
            1 => tables.iter().map(FiniteTable::order).max(),
            _ => None,
        };
        Ok(Group {
            backend: Backend::FreeProduct { factors: tables },
            generators,
            names,
            order,
            table_words: table_words_all,
            factor_offsets: offsets,
        })
    }

    pub fn kind(&self) -> GroupKind {
        match self.backend {
            Backend::Table(_) => GroupKind::FiniteTable,
            Backend::Permutation { .. } => GroupKind::Permutation,
            Backend::Free { .. } => GroupKind::Free,
            Backend::FreeProduct { .. } => GroupKind::FreeProduct,
            Backend::FreeAbelian { .. } => GroupKind::FreeAbelian,
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    /// Group order, known for finite kinds.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn is_finite(&self) -> bool {
        self.order.is_some()
    }

    pub fn identity(&self) -> Element {
        match &self.backend {
            Backend::Table(t) => Element::Index(t.identity()),
            Backend::Permutation { degree } => Element::Perm((0..*degree as u32).collect()),
            Backend::Free { .. } => Element::Word(vec![]),
            Backend::FreeProduct { .. } => Element::Syllables(vec![]),
            Backend::FreeAbelian { rank } => Element::Vector(vec![0; *rank]),
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// Number of letters in `S⁺`.
    pub fn letter_count(&self) -> usize {
        2 * self.generators.len()
    }

    pub fn letter_element(&self, l: Letter) -> Element {
        let g = &self.generators[letter_generator(l)].element;
        if letter_is_inverse(l) {
            self.invert(g)
        } else {
            g.clone()
        }
    }

    /// Checks that `g` is a well-formed canonical form for this backend.
    pub fn validate(&self, g: &Element) -> Result<()> {
        let ok = match (&self.backend, g) {
            (Backend::Table(t), Element::Index(i)) => (*i as usize) < t.order(),
            (Backend::Permutation { degree }, Element::Perm(p)) => {
                let mut seen = vec![false; *degree];
                p.len() == *degree
                    && p.iter().all(|&x| {
                        (x as usize) < *degree && !std::mem::replace(&mut seen[x as usize], true)
                    })
            }
            (Backend::Free { rank }, Element::Word(w)) => {
                w.iter()
                    .all(|&x| x != 0 && x.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Backend::FreeProduct { factors }, Element::Syllables(s)) => {
                s.iter().all(|&(f, x)| {
                    (f as usize) < factors.len()
                        && (x as usize) < factors[f as usize].order()
                        && x != factors[f as usize].identity()
                }) && s.windows(2).all(|p| p[0].0 != p[1].0)
            }
            (Backend::FreeAbelian { rank }, Element::Vector(v)) => v.len() == *rank,
            _ => {
                return Err(Error::BackendMismatch(format!(
                    "{} element used with a {} group",
                    variant_name(g),
                    self.kind()
                )))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "malformed {} element {g:?}",
                self.kind()
            )))
        }
    }

    /// Product `g·h`, validating both operands.
    pub fn try_multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.multiply(g, h))
    }

    /// Product `g·h` of two valid elements.
    ///
    /// Panics on a backend mismatch; use [`Group::try_multiply`] for unchecked input.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        match (&self.backend, g, h) {
            (Backend::Table(t), Element::Index(a), Element::Index(b)) => {
                Element::Index(t.mul(*a, *b))
            }
            (Backend::Permutation { .. }, Element::Perm(a), Element::Perm(b)) => {
                Element::Perm(b.iter().map(|&i| a[i as usize]).collect())
            }
            (Backend::Free { .. }, Element::Word(a), Element::Word(b)) => {
                let mut out = a.clone();
                for &x in b {
                    if out.last() == Some(&-x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                Element::Word(out)
            }
            (Backend::FreeProduct { factors }, Element::Syllables(a), Element::Syllables(b)) => {
                let mut out = a.clone();
                for &(f, x) in b {
                    match out.last() {
                        Some(&(lf, lx)) if lf == f => {
                            out.pop();
                            let p = factors[f as usize].mul(lx, x);
                            if p != factors[f as usize].identity() {
                                out.push((f, p));
                            }
                        }
                        _ => out.push((f, x)),
                    }
                }
                Element::Syllables(out)
            }
            (Backend::FreeAbelian { .. }, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => panic!(
                "backend mismatch: {} · {} in a {} group",
                variant_name(g),
                variant_name(h),
                self.kind()
            ),
        }
    }

    pub fn invert(&self, g: &Element) -> Element {
        match (&self.backend, g) {
            (Backend::Table(t), Element::Index(a)) => Element::Index(t.inv(*a)),
            (Backend::Permutation { .. }, Element::Perm(p)) => {
                let mut inv = vec![0u32; p.len()];
                for (i, &x) in p.iter().enumerate() {
                    inv[x as usize] = i as u32;
                }
                Element::Perm(inv)
            }
            (Backend::Free { .. }, Element::Word(w)) => {
                Element::Word(w.iter().rev().map(|x| -x).collect())
            }
            (Backend::FreeProduct { factors }, Element::Syllables(s)) => Element::Syllables(
                s.iter()
                    .rev()
                    .map(|&(f, x)| (f, factors[f as usize].inv(x)))
                    .collect(),
            ),
            (Backend::FreeAbelian { .. }, Element::Vector(v)) => {
                Element::Vector(v.iter().map(|x| -x).collect())
            }
            _ => panic!(
                "backend mismatch: {} in a {} group",
                variant_name(g),
                self.kind()
            ),
        }
    }

    /// `g^n` for any integer `n`.
    pub fn power(&self, g: &Element, n: i64) -> Element {
        let base = if n < 0 { self.invert(g) } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// Element spelled by a letter sequence.
    pub fn evaluate(&self, letters: &[Letter]) -> Element {
        letters.iter().fold(self.identity(), |acc, &l| {
            self.multiply(&acc, &self.letter_element(l))
        })
    }

    /// Enumerates the ball of radius `radius` in shortlex order of least words.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<Window> {
        Window::enumerate(self, radius, cap)
    }

    /// Enumerates the whole group; fails for infinite kinds.
    pub fn full_window(&self, cap: usize) -> Result<Window> {
        match self.order {
            Some(n) if n > cap => Err(Error::ResourceCap {
                what: "group order".into(),
                cap,
            }),
            Some(_) => self.ball(usize::MAX, cap),
            None => Err(Error::WindowExceeded(format!(
                "{} group is infinite",
                self.kind()
            ))),
        }
    }

    /// Parses a word in the generator names (`e` is the identity). Permutation
    /// groups also accept 1-based cycle notation `(1 2 3)(4 5)`, free abelian
    /// groups coordinate tuples `(1,-2)`, and finite tables `#i`.
    pub fn parse_element(&self, input: &str) -> Result<Element> {
        let s = input.trim();
        match (&self.backend, s.as_bytes().first()) {
            (Backend::Permutation { degree }, Some(b'(')) if !s.contains(',') => {
                parse_cycles(*degree, s)
            }
            (Backend::FreeAbelian { .. }, Some(b'(')) => {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::invalid(format!("bad vector `{s}`")))?;
                let v: Vec<i64> = inner
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Error::invalid(format!("bad vector `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                let g = Element::Vector(v);
                self.validate(&g)?;
                Ok(g)
            }
            (Backend::Table(t), Some(b'#')) => {
                let i: u32 = s[1..]
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad table index `{s}`")))?;
                if i as usize >= t.order() {
                    return Err(Error::invalid(format!("table index `{s}` out of range")));
                }
                Ok(Element::Index(i))
            }
            _ => {
                let syllables = word::parse_word(&self.names, s)?;
                Ok(syllables.into_iter().fold(self.identity(), |acc, (g, e)| {
                    self.multiply(&acc, &self.power(&self.generators[g].element, e))
                }))
            }
        }
    }

    /// Canonical text form; `parse_element(format_element(g)) == g`.
    pub fn format_element(&self, g: &Element) -> String {
        match (&self.backend, g) {
            (Backend::Table(_), Element::Index(i)) => {
                word::format_letters(&self.names, &self.table_words[0][*i as usize])
            }
            (Backend::Permutation { .. }, Element::Perm(p)) => format_cycles(p),
            (Backend::Free { .. }, Element::Word(w)) => {
                let letters: Vec<Letter> = w
                    .iter()
                    .map(|&x| word::letter(x.unsigned_abs() as usize - 1, x < 0))
                    .collect();
                word::format_letters(&self.names, &letters)
            }
            (Backend::FreeProduct { .. }, Element::Syllables(s)) => {
                let letters: Vec<Letter> = s
                    .iter()
                    .flat_map(|&(f, x)| self.table_words[f as usize][x as usize].iter().copied())
                    .collect();
                word::format_letters(&self.names, &letters)
            }
            (Backend::FreeAbelian { .. }, Element::Vector(v)) => {
                let syl: Vec<(usize, i64)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, &x)| (i, x))
                    .collect();
                word::format_syllables(&self.names, &syl)
            }
            _ => format!("{g:?}"),
        }
    }

    /// Free-product factor index and its first generator, if applicable.
    pub(crate) fn factor_of_generator(&self, gen: usize) -> Option<usize> {
        match &self.backend {
            Backend::FreeProduct { .. } => self.factor_offsets.iter().rposition(|&o| o <= gen),
            _ => None,
        }
    }

    pub(crate) fn factor_count(&self) -> usize {
        match &self.backend {
            Backend::FreeProduct { factors } => factors.len(),
            _ => 0,
        }
    }

    pub(crate) fn factor_table(&self, f: usize) -> Option<&FiniteTable> {
        match &self.backend {
            Backend::FreeProduct { factors } => factors.get(f),
            _ => None,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        match &self.backend {
            Backend::Free { rank } | Backend::FreeAbelian { rank } => *rank,
            _ => self.generators.len(),
        }
    }
}

fn variant_name(g: &Element) -> &'static str {
    match g {
        Element::Index(_) => "finite-table",
        Element::Perm(_) => "permutation",
        Element::Word(_) => "free",
        Element::Syllables(_) => "free-product",
        Element::Vector(_) => "free-abelian",
    }
}

/// Shortlex-least words (over global letters starting at `letter_offset/2`)
/// for every table element, by breadth-first search.
fn table_words(table: &FiniteTable, gens: &[u32], gen_offset: usize) -> Vec<Option<Vec<Letter>>> {
    let mut words: Vec<Option<Vec<Letter>>> = vec![None; table.order()];
    words[table.identity() as usize] = Some(vec![]);
    let mut queue = VecDeque::from([table.identity()]);
    while let Some(x) = queue.pop_front() {
        for (i, &g) in gens.iter().enumerate() {
            for inverse in [false, true] {
                let step = if inverse { table.inv(g) } else { g };
                let y = table.mul(x, step);
                if words[y as usize].is_none() {
                    let mut w = words[x as usize].clone().unwrap();
                    w.push(word::letter(gen_offset + i, inverse));
                    words[y as usize] = Some(w);
                    queue.push_back(y);
                }
            }
        }
    }
    words
}

fn parse_cycles(degree: usize, s: &str) -> Result<Element> {
    let mut perm: Vec<u32> = (0..degree as u32).collect();
    let bad = || Error::invalid(format!("bad cycle notation `{s}`"));
    let mut rest = s.trim();
    // Cycles are composed right to left, like any permutation product.
    let mut cycles = Vec::new();
    while !rest.is_empty() {
        let body_end = rest.find(')').ok_or_else(bad)?;
        let body = rest.strip_prefix('(').ok_or_else(bad)?;
        let body = &body[..body_end - 1];
        let points: Vec<u32> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if points.iter().any(|&p| p == 0 || p as usize > degree) {
            return Err(Error::invalid(format!(
                "cycle point out of 1..={degree} in `{s}`"
            )));
        }
        cycles.push(points);
        rest = rest[body_end + 1..].trim_start();
    }
    for points in cycles.iter().rev() {
        let mut cyc: Vec<u32> = (0..degree as u32).collect();
        for (i, &p) in points.iter().enumerate() {
            let q = points[(i + 1) % points.len()];
            cyc[p as usize - 1] = q - 1;
        }
        // perm := cyc ∘ perm
        perm = perm.iter().map(|&i| cyc[i as usize]).collect();
    }
    let g = Element::Perm(perm);
    let mut seen = vec![false; degree];
    if let Element::Perm(p) = &g {
        for &x in p {
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(bad());
            }
        }
    }
    Ok(g)
}

fn format_cycles(p: &[u32]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push((i + 1).to_string());
            i = p[i] as usize;
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

/// Ball of radius `L` in a group, in shortlex order of least words.
#[derive(Clone, Debug)]
pub struct Window {
    radius: usize,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    lengths: Vec<u32>,
    /// `(prefix index, last letter)` of each element's shortlex-least word.
    parents: Vec<Option<(usize, Letter)>>,
    closed: bool,
    complete: bool,
}

impl Window {
    fn enumerate(group: &Group, radius: usize, cap: usize) -> Result<Window> {
        let letters: Vec<Element> = (0..group.letter_count())
            .map(|l| group.letter_element(l))
            .collect();
        let id = group.identity();
        let mut w = Window {
            radius,
            elements: vec![id.clone()],
            index: HashMap::from([(id, 0)]),
            lengths: vec![0],
            parents: vec![None],
            closed: false,
            complete: false,
        };
        let mut level_start = 0;
        let mut level = 0;
        while level < radius {
            let level_end = w.elements.len();
            for i in level_start..level_end {
                for (l, x) in letters.iter().enumerate() {
                    let y = group.multiply(&w.elements[i], x);
                    if w.index.contains_key(&y) {
                        continue;
                    }
                    if w.elements.len() >= cap {
                        return Err(Error::ResourceCap {
                            what: format!("ball of radius {radius}"),
                            cap,
                        });
                    }
                    w.index.insert(y.clone(), w.elements.len());
                    w.elements.push(y);
                    w.lengths.push(level as u32 + 1);
                    w.parents.push(Some((i, l)));
                }
            }
            if w.elements.len() == level_end {
                w.closed = true;
                break;
            }
            level_start = level_end;
            level += 1;
        }
        if !w.closed {
            w.closed = (level_start..w.elements.len()).all(|i| {
                letters
                    .iter()
                    .all(|x| w.index.contains_key(&group.multiply(&w.elements[i], x)))
            });
        }
        if w.closed {
            w.radius = w.lengths.last().copied().unwrap_or(0) as usize;
        }
        w.complete = w.closed || group.order == Some(w.elements.len());
        Ok(w)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    /// Word length of element `i`.
    pub fn length(&self, i: usize) -> usize {
        self.lengths[i] as usize
    }

    /// Prefix and last letter of the shortlex-least word of element `i`.
    pub fn parent(&self, i: usize) -> Option<(usize, Letter)> {
        self.parents[i]
    }

    /// Shortlex-least word of element `i`.
    pub fn word(&self, mut i: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.length(i));
        while let Some((p, l)) = self.parents[i] {
            out.push(l);
            i = p;
        }
        out.reverse();
        out
    }

    /// True when the ball equals the ball of radius `L + 1`.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// True when the window is the whole (finite) group.
    pub fn is_complete(&self) -> bool {
        self.complete
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn s3() -> Group {
        Group::permutation(
            3,
            vec![("s".into(), vec![1, 0, 2]), ("r".into(), vec![1, 2, 0])],
        )
        .unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let f2 = Group::free(names(&["a", "b"])).unwrap();
        let g = f2.parse_element("ab^-1a").unwrap();
        assert_eq!(f2.multiply(&f2.identity(), &g), g);
        assert_eq!(f2.multiply(&g, &f2.identity()), g);
    }

    #[test]
    fn free_reduction() {
        let f2 = Group::free(names(&["a", "b"])).unwrap();
        let ab = f2.parse_element("ab").unwrap();
        let bia = f2.parse_element("b^-1a").unwrap();
        assert_eq!(f2.multiply(&ab, &bia), f2.parse_element("a^2").unwrap());
        assert_eq!(f2.format_element(&f2.multiply(&ab, &bia)), "a^2");
    }

    #[test]
    fn transposition_is_an_involution() {
        let g = s3();
        let t = g.parse_element("(1 2)").unwrap();
        assert_eq!(g.multiply(&t, &t), g.identity());
        assert_eq!(g.order(), Some(6));
    }

    #[test]
    fn permutation_product_applies_right_factor_first() {
        let g = s3();
        let a = g.parse_element("(1 2)").unwrap();
        let b = g.parse_element("(2 3)").unwrap();
        // (1 2)(2 3): 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1.
        assert_eq!(g.format_element(&g.multiply(&a, &b)), "(1 2 3)");
        assert_eq!(g.parse_element("(1 2)(2 3)").unwrap(), g.multiply(&a, &b));
    }

    #[test]
    fn mismatched_backend_is_an_error() {
        let f2 = Group::free(names(&["a", "b"])).unwrap();
        let err = f2
            .try_multiply(&Element::Index(0), &f2.identity())
            .unwrap_err();
        assert!(matches!(err, Error::BackendMismatch(_)));
        assert!(f2.validate(&Element::Word(vec![1, -1])).is_err());
    }

    #[test]
    fn free_ball_sizes() {
        let f2 = Group::free(names(&["a", "b"])).unwrap();
        assert_eq!(f2.ball(0, DEFAULT_CAP).unwrap().len(), 1);
        assert_eq!(f2.ball(1, DEFAULT_CAP).unwrap().len(), 5);
        assert_eq!(f2.ball(2, DEFAULT_CAP).unwrap().len(), 17);
        assert!(!f2.ball(2, DEFAULT_CAP).unwrap().is_closed());
        assert!(matches!(f2.ball(3, 20), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn cyclic_ball_covers_group() {
        let z5 = Group::cyclic(5, "t").unwrap();
        let w = z5.ball(2, DEFAULT_CAP).unwrap();
        assert_eq!(w.len(), 5);
        assert!(w.is_complete());
        assert!(w.is_closed());
    }

    #[test]
    fn ball_order_is_shortlex() {
        let f2 = Group::free(names(&["a", "b"])).unwrap();
        let w = f2.ball(2, DEFAULT_CAP).unwrap();
        let shown: Vec<String> = w
            .elements()
            .iter()
            .take(7)
            .map(|g| f2.format_element(g))
            .collect();
        assert_eq!(shown, ["e", "a", "a^-1", "b", "b^-1", "a^2", "ab"]);
        for i in 0..w.len() {
            assert_eq!(f2.evaluate(&w.word(i)), *w.element(i));
            assert_eq!(w.word(i).len(), w.length(i));
        }
    }

    #[test]
    fn free_product_normal_forms() {
        let g = Group::free_product(vec![
            (FiniteTable::cyclic(2).unwrap(), vec![("s".into(), 1)]),
            (FiniteTable::cyclic(3).unwrap(), vec![("t".into(), 1)]),
        ])
        .unwrap();
        let x = g.parse_element("st^2s").unwrap();
        assert_eq!(g.format_element(&x), "st^-1s");
        assert_eq!(g.multiply(&x, &g.invert(&x)), g.identity());
        assert_eq!(g.parse_element("stt^2s").unwrap(), g.identity());
        assert!(!g.is_finite());
        // |ball(2)| = 1 + 3 + (s·t^{±1}, t^{±1}·s) = 8
        assert_eq!(g.ball(2, DEFAULT_CAP).unwrap().len(), 8);
    }

    #[test]
    fn free_abelian_words() {
        let z2 = Group::free_abelian(names(&["x", "y"])).unwrap();
        let v = z2.parse_element("(2,-1)").unwrap();
        assert_eq!(z2.format_element(&v), "x^2y^-1");
        assert_eq!(z2.parse_element("x^2y^-1").unwrap(), v);
        // |ball(L)| = 2L^2 + 2L + 1
        assert_eq!(z2.ball(3, DEFAULT_CAP).unwrap().len(), 25);
    }

    #[test]
    fn trivial_free_group() {
        let f0 = Group::free(vec![]).unwrap();
        assert_eq!(f0.order(), Some(1));
        assert!(f0.full_window(DEFAULT_CAP).unwrap().is_complete());
    }

    #[test]
    fn table_elements_format_as_words() {
        let z12 = Group::cyclic(12, "t").unwrap();
        let x = Element::Index(11);
        assert_eq!(z12.format_element(&x), "t^-1");
        assert_eq!(z12.parse_element("t^-1").unwrap(), x);
        assert_eq!(z12.parse_element("#11").unwrap(), x);
    }
}

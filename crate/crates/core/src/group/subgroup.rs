use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::{Element, Group, GroupKind, Lattice, Window};
use crate::error::{Error, Result};

/// How membership in a subgroup is decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Finite subgroup, listed exhaustively.
    Enumerated(BTreeSet<Element>),
    /// Free group: words using only the flagged generators.
    FreeLetters(Vec<bool>),
    /// Free product: normal forms using only the flagged factors.
    FreeFactors(Vec<bool>),
    /// Free abelian group: a sublattice.
    Lattice(Lattice),
}

/// A subgroup `H ≤ G` with a decidable membership rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    generators: Vec<Element>,
    membership: Membership,
}

impl Subgroup {
    pub fn trivial(group: &Group) -> Self {
        Subgroup {
            generators: vec![],
            membership: Membership::Enumerated(BTreeSet::from([group.identity()])),
        }
    }

    /// The subgroup generated by `generators`, with a membership rule chosen
    /// from the backend: enumeration for finite subgroups, letter/factor tests
    /// for free and free-product groups, Hermite reduction for `Z^n`.
    pub fn generated(group: &Group, generators: Vec<Element>, cap: usize) -> Result<Self> {
        for g in &generators {
            group.validate(g)?;
        }
        let nontrivial: Vec<&Element> = generators
            .iter()
            .filter(|g| !group.is_identity(g))
            .collect();
        if nontrivial.is_empty() {
            return Ok(Subgroup {
                generators,
                ..Subgroup::trivial(group)
            });
        }
        let membership = match group.kind() {
            _ if group.is_finite() => Membership::Enumerated(closure(group, &generators, cap)?),
            GroupKind::FreeAbelian => {
                let vectors: Vec<Vec<i64>> = nontrivial
                    .iter()
                    .map(|g| match g {
                        Element::Vector(v) => v.clone(),
                        _ => unreachable!("validated"),
                    })
                    .collect();
                Membership::Lattice(Lattice::new(group.rank(), &vectors))
            }
            GroupKind::Free => {
                let mut letters = vec![false; group.rank()];
                for g in &nontrivial {
                    match g {
                        Element::Word(w) if w.len() == 1 => {
                            letters[w[0].unsigned_abs() as usize - 1] = true
                        }
                        _ => {
                            return Err(Error::Unsupported(format!(
                                "free-group subgroups must be generated by basis letters; got `{}`",
                                group.format_element(g)
                            )))
                        }
                    }
                }
                Membership::FreeLetters(letters)
            }
            GroupKind::FreeProduct => {
                let mut factors = vec![false; group.factor_count()];
                for g in &nontrivial {
                    match g {
                        Element::Syllables(s) if s.len() == 1 => factors[s[0].0 as usize] = true,
                        _ => {
                            return Err(Error::Unsupported(format!(
                            "free-product subgroups must be generated by factor elements; got `{}`",
                            group.format_element(g)
                        )))
                        }
                    }
                }
                if factors.iter().filter(|&&f| f).count() == 1 {
                    Membership::Enumerated(closure(group, &generators, cap)?)
                } else {
                    for (f, used) in factors.iter().enumerate() {
                        if !used {
                            continue;
                        }
                        let own: Vec<Element> = nontrivial
                            .iter()
                            .filter(|g| matches!(g, Element::Syllables(s) if s[0].0 as usize == f))
                            .map(|g| (*g).clone())
                            .collect();
                        let size = closure(group, &own, cap)?.len();
                        if size != group.factor_table(f).map_or(0, |t| t.order()) {
                            return Err(Error::Unsupported(format!(
                                "subgroup meets factor {f} in a proper subgroup; only whole factors are supported"
                            )));
                        }
                    }
                    Membership::FreeFactors(factors)
                }
            }
            _ => unreachable!("finite kinds handled above"),
        };
        Ok(Subgroup {
            generators,
            membership,
        })
    }

    /// Subgroup of a free group generated by the named basis letters.
    pub fn free_letters(group: &Group, names: &[String]) -> Result<Self> {
        if group.kind() != GroupKind::Free {
            return Err(Error::BackendMismatch(
                "letter subgroups need a free group".into(),
            ));
        }
        let gens = names
            .iter()
            .map(|n| group.parse_element(n))
            .collect::<Result<Vec<_>>>()?;
        Subgroup::generated(group, gens, super::DEFAULT_CAP)
    }

    /// Subgroup of a free product generated by whole factors.
    pub fn free_factors(group: &Group, factors: &[usize]) -> Result<Self> {
        if group.kind() != GroupKind::FreeProduct {
            return Err(Error::BackendMismatch(
                "factor subgroups need a free product".into(),
            ));
        }
        let mut gens = Vec::new();
        for (i, g) in group.generators().iter().enumerate() {
            let f = group.factor_of_generator(i).unwrap_or(usize::MAX);
            if factors.contains(&f) {
                gens.push(g.element.clone());
            }
        }
        if let Some(&bad) = factors.iter().find(|&&f| f >= group.factor_count()) {
            return Err(Error::invalid(format!("no factor {bad}")));
        }
        Subgroup::generated(group, gens, super::DEFAULT_CAP)
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    /// Subgroup order when finite.
    pub fn order(&self) -> Option<usize> {
        match &self.membership {
            Membership::Enumerated(s) => Some(s.len()),
            _ => None,
        }
    }

    /// Whether `H` is infinite (free factors are assumed nontrivial).
    pub fn is_infinite(&self) -> bool {
        match &self.membership {
            Membership::Enumerated(_) => false,
            Membership::FreeLetters(l) => l.iter().any(|&x| x),
            Membership::FreeFactors(f) => f.iter().filter(|&&x| x).count() >= 2,
            Membership::Lattice(l) => l.rank() > 0,
        }
    }

    /// Listed elements of a finite subgroup.
    pub fn elements(&self) -> Option<&BTreeSet<Element>> {
        match &self.membership {
            Membership::Enumerated(s) => Some(s),
            _ => None,
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (&self.membership, g) {
            (Membership::Enumerated(s), _) => s.contains(g),
            (Membership::FreeLetters(l), Element::Word(w)) => {
                w.iter().all(|x| l[x.unsigned_abs() as usize - 1])
            }
            (Membership::FreeFactors(f), Element::Syllables(s)) => {
                s.iter().all(|&(i, _)| f[i as usize])
            }
            (Membership::Lattice(l), Element::Vector(v)) => l.contains(v),
            _ => false,
        }
    }

    /// A value shared exactly by the elements of one left coset `gH`.
    pub fn coset_key(&self, group: &Group, g: &Element) -> Element {
        match (&self.membership, g) {
            (Membership::Enumerated(s), _) => s
                .iter()
                .map(|h| group.multiply(g, h))
                .min()
                .expect("subgroup contains the identity"),
            (Membership::FreeLetters(l), Element::Word(w)) => {
                let keep = w
                    .iter()
                    .rposition(|x| !l[x.unsigned_abs() as usize - 1])
                    .map_or(0, |p| p + 1);
                Element::Word(w[..keep].to_vec())
            }
            (Membership::FreeFactors(f), Element::Syllables(s)) => {
                let keep = s
                    .iter()
                    .rposition(|&(i, _)| !f[i as usize])
                    .map_or(0, |p| p + 1);
                Element::Syllables(s[..keep].to_vec())
            }
            (Membership::Lattice(l), Element::Vector(v)) => Element::Vector(l.reduce(v)),
            _ => g.clone(),
        }
    }
}

/// Whether `g ∈ H`.
pub fn is_in_subgroup(g: &Element, h: &Subgroup) -> bool {
    h.contains(g)
}

/// Closure of `generators` under multiplication and inversion.
pub fn closure(group: &Group, generators: &[Element], cap: usize) -> Result<BTreeSet<Element>> {
    let mut steps: Vec<Element> = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(group.invert(g));
    }
    let mut seen = BTreeSet::from([group.identity()]);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = group.multiply(&x, s);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::ResourceCap {
                        what: "subgroup closure".into(),
                        cap,
                    });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Every subgroup of a finite group, ordered by size and then elements.
pub fn all_subgroups(group: &Group, cap: usize) -> Result<Vec<Subgroup>> {
    let window = group.full_window(cap)?;
    let mut found: Vec<(BTreeSet<Element>, Vec<Element>)> =
        vec![(BTreeSet::from([group.identity()]), vec![])];
    let mut known: BTreeSet<BTreeSet<Element>> = found.iter().map(|f| f.0.clone()).collect();
    let mut next = 0;
    while next < found.len() {
        let (elements, gens) = found[next].clone();
        next += 1;
        for x in window.elements() {
            if elements.contains(x) {
                continue;
            }
            let mut g2 = gens.clone();
            g2.push(x.clone());
            let c = closure(group, &g2, cap)?;
            if known.insert(c.clone()) {
                found.push((c, g2));
            }
        }
    }
    found.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(found
        .into_iter()
        .map(|(elements, generators)| Subgroup {
            generators,
            membership: Membership::Enumerated(elements),
        })
        .collect())
}

/// Canonical label of a left coset: its shortlex-least element in the window.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetId {
    /// Window index of the representative.
    pub index: usize,
    pub representative: Element,
}

/// Coset labels for every window element, computed in one pass.
#[derive(Clone, Debug)]
pub struct CosetTable {
    by_key: HashMap<Element, usize>,
    of_element: Vec<usize>,
    representatives: Vec<usize>,
}

impl CosetTable {
    pub fn new(group: &Group, h: &Subgroup, window: &Window) -> Self {
        let mut by_key = HashMap::new();
        let mut of_element = Vec::with_capacity(window.len());
        let mut representatives = Vec::new();
        for (i, g) in window.elements().iter().enumerate() {
            let key = h.coset_key(group, g);
            let rep = *by_key.entry(key).or_insert_with(|| {
                representatives.push(i);
                i
            });
            of_element.push(rep);
        }
        CosetTable {
            by_key,
            of_element,
            representatives,
        }
    }

    /// Representative window index for window element `i`.
    pub fn representative_of(&self, i: usize) -> usize {
        self.of_element[i]
    }

    /// Window indices of all representatives, in shortlex order.
    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    /// Representative index of the coset `gH` for any `g`, if it meets the window.
    pub fn lookup(&self, group: &Group, h: &Subgroup, g: &Element) -> Option<usize> {
        self.by_key.get(&h.coset_key(group, g)).copied()
    }

    pub fn canonical(
        &self,
        group: &Group,
        h: &Subgroup,
        window: &Window,
        g: &Element,
    ) -> Result<CosetId> {
        let index = self.lookup(group, h, g).ok_or_else(|| {
            Error::WindowExceeded(format!(
                "coset of `{}` has no representative of length ≤ {}",
                group.format_element(g),
                window.radius()
            ))
        })?;
        Ok(CosetId {
            index,
            representative: window.element(index).clone(),
        })
    }
}

/// Shortlex-least representative of `gH` inside `window`.
pub fn coset_canonical(
    g: &Element,
    h: &Subgroup,
    group: &Group,
    window: &Window,
) -> Result<CosetId> {
    group.validate(g)?;
    CosetTable::new(group, h, window).canonical(group, h, window, g)
}

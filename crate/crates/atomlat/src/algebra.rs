//! The master algebra M, its dual M*, and the mutable learning state.
//!
//! Elements are represented by their atom sets: each master constant stores
//! the set of atoms edged to it, terms store component constants and derive
//! their atom set as the union of the components'. The partial order is set
//! inclusion of atom sets. The dual keeps an explicit reversed adjacency
//! between dual constants plus a materialized dual-atom set per node; dual
//! sets of dual-of-atom nodes are derived from fingerprints.
//!
//! Graphs are kept transitively closed at every public operation boundary:
//! inserting an atom puts it in everything reachable above its targets, and
//! inserting a dual atom or dual edge propagates along the dual adjacency.

use std::cell::RefCell;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConstantId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AtomId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DualAtomId(pub u32);

/// Node index in the dual graph (duals of constants and of terms).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DualId(pub u32);

/// Bottom atom 0, member of every master constant. Permanent.
pub const BOTTOM_ATOM: AtomId = AtomId(0);
/// Bottom dual atom 0*, member of every dual element. Permanent.
pub const BOTTOM_DUAL_ATOM: DualAtomId = DualAtomId(0);

/// Typed reference to an element of the master or the dual algebra.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum ElementRef {
    Constant(ConstantId),
    Term(TermId),
    Atom(AtomId),
    DualConstant(DualId),
    DualOfAtom(AtomId),
    DualAtom(DualAtomId),
}

impl ElementRef {
    pub fn is_master(&self) -> bool {
        matches!(
            self,
            ElementRef::Constant(_) | ElementRef::Term(_) | ElementRef::Atom(_)
        )
    }
}

impl From<ConstantId> for ElementRef {
    fn from(c: ConstantId) -> Self {
        ElementRef::Constant(c)
    }
}

impl From<TermId> for ElementRef {
    fn from(t: TermId) -> Self {
        ElementRef::Term(t)
    }
}

impl From<AtomId> for ElementRef {
    fn from(a: AtomId) -> Self {
        ElementRef::Atom(a)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Sign {
    Positive,
    Negative,
}

/// One training relation: `lhs < rhs` or its negation. Both sides are master
/// constants or terms.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub sign: Sign,
    pub lhs: ElementRef,
    pub rhs: ElementRef,
}

impl Relation {
    pub fn positive(lhs: impl Into<ElementRef>, rhs: impl Into<ElementRef>) -> Self {
        Relation {
            sign: Sign::Positive,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }

    pub fn negative(lhs: impl Into<ElementRef>, rhs: impl Into<ElementRef>) -> Self {
        Relation {
            sign: Sign::Negative,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Positive
    }
}

#[derive(Clone)]
struct ConstantEntry {
    name: String,
    /// GL^a(c): master atoms edged to this constant, bottom included.
    atoms: BitSet,
    dual: DualId,
}

#[derive(Clone)]
struct TermEntry {
    /// Component constants. Atom set is derived as the union of theirs.
    components: BitSet,
    dual: DualId,
    alive: bool,
}

#[derive(Clone)]
struct AtomEntry {
    /// Constants that contain this atom. Immutable once created. The bottom
    /// atom virtually spans every constant and is special-cased.
    fingerprint: BitSet,
    alive: bool,
}

// Only read through Debug when a validator trips.
#[derive(Copy, Clone, Debug)]
#[allow(dead_code)]
enum DualNodeKind {
    OfConstant(ConstantId),
    OfTerm(TermId),
}

#[derive(Clone)]
struct DualNode {
    kind: DualNodeKind,
    /// Direct edges to dual nodes above (this < target).
    up: Vec<DualId>,
    /// Reverse of `up`.
    down: Vec<DualId>,
    /// GL^a in M*: dual atoms at or below this node. 0* included.
    atoms: BitSet,
    alive: bool,
}

#[derive(Clone, Default)]
struct Caches {
    /// Derived GL^a([phi]) per master atom, keyed by dual revision.
    atom_dual: Vec<Option<(u64, BitSet)>>,
    /// Trace per constant, keyed by (per-constant master stamp, dual revision).
    constant_trace: Vec<Option<(u64, u64, BitSet)>>,
}

/// The paired master/dual graphs plus the seeded random stream; the single
/// mutable learning state.
#[derive(Clone)]
pub struct AlgebraState {
    constants: Vec<ConstantEntry>,
    names: HashMap<String, ConstantId>,
    terms: Vec<TermEntry>,
    term_lookup: HashMap<Vec<u32>, TermId>,
    atoms: Vec<AtomEntry>,
    live_atoms: BitSet,
    dual: Vec<DualNode>,
    live_dual_atoms: BitSet,
    next_dual_atom: u32,
    /// Bumped on any dual-side change; invalidates derived dual sets.
    dual_rev: u64,
    /// Per-constant stamp bumped when its atom set changes.
    const_rev: Vec<u64>,
    rev_counter: u64,
    rng: ChaCha8Rng,
    seed: u64,
    caches: RefCell<Caches>,
}

impl AlgebraState {
    pub fn new(seed: u64) -> Self {
        let mut state = AlgebraState {
            constants: Vec::new(),
            names: HashMap::new(),
            terms: Vec::new(),
            term_lookup: HashMap::new(),
            atoms: Vec::new(),
            live_atoms: BitSet::new(),
            dual: Vec::new(),
            live_dual_atoms: BitSet::new(),
            next_dual_atom: 1,
            dual_rev: 1,
            const_rev: Vec::new(),
            rev_counter: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            caches: RefCell::new(Caches::default()),
        };
        // Bottom atoms 0 and 0* exist from the start and are undeletable.
        state.atoms.push(AtomEntry {
            fingerprint: BitSet::new(),
            alive: true,
        });
        state.live_atoms.insert(0);
        state.live_dual_atoms.insert(0);
        state
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform choice implemented as ascending collection + seeded shuffle.
    pub(crate) fn shuffled(&mut self, mut items: Vec<usize>) -> Vec<usize> {
        items.sort_unstable();
        items.shuffle(&mut self.rng);
        items
    }

    // ---------------------------------------------------------------- master

    pub fn add_constant(&mut self, name: &str) -> Result<ElementRef> {
        if self.names.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let id = ConstantId(self.constants.len() as u32);
        let dual = self.new_dual_node(DualNodeKind::OfConstant(id));
        let mut atoms = BitSet::new();
        atoms.insert(BOTTOM_ATOM.0 as usize);
        self.constants.push(ConstantEntry {
            name: name.to_string(),
            atoms,
            dual,
        });
        self.names.insert(name.to_string(), id);
        let stamp = self.bump();
        self.const_rev.push(stamp);
        Ok(ElementRef::Constant(id))
    }

    pub fn constant_id(&self, name: &str) -> Result<ConstantId> {
        self.names
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    pub fn constant_name(&self, c: ConstantId) -> &str {
        &self.constants[c.0 as usize].name
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn constant_ids(&self) -> impl Iterator<Item = ConstantId> + '_ {
        (0..self.constants.len() as u32).map(ConstantId)
    }

    /// Registers the merge of `components`. Identical component sets map to
    /// the same term.
    pub fn define_term(&mut self, components: &[ConstantId]) -> Result<ElementRef> {
        if components.is_empty() {
            return Err(Error::EmptyTerm);
        }
        let mut set = BitSet::new();
        for c in components {
            if c.0 as usize >= self.constants.len() {
                return Err(Error::UnknownConstant(format!("#{}", c.0)));
            }
            set.insert(c.0 as usize);
        }
        let key: Vec<u32> = set.iter().map(|i| i as u32).collect();
        if let Some(&t) = self.term_lookup.get(&key) {
            return Ok(ElementRef::Term(t));
        }
        let id = TermId(self.terms.len() as u32);
        let dual = self.new_dual_node(DualNodeKind::OfTerm(id));
        // Reversed definitional edges: [T] sits below each component dual.
        for c in set.iter() {
            let cd = self.constants[c].dual;
            self.add_dual_edge(dual, cd);
        }
        self.terms.push(TermEntry {
            components: set,
            dual,
            alive: true,
        });
        self.term_lookup.insert(key, id);
        Ok(ElementRef::Term(id))
    }

    pub fn term_components(&self, t: TermId) -> &BitSet {
        &self.terms[t.0 as usize].components
    }

    pub fn term_is_live(&self, t: TermId) -> bool {
        self.terms
            .get(t.0 as usize)
            .map(|e| e.alive)
            .unwrap_or(false)
    }

    /// Inserts a fresh master atom edged to every target (constants or
    /// atoms); closure places it in everything above them.
    pub fn add_atom(&mut self, targets: &[ElementRef]) -> Result<ElementRef> {
        let mut fingerprint = BitSet::new();
        for t in targets {
            match *t {
                ElementRef::Constant(c) if (c.0 as usize) < self.constants.len() => {
                    fingerprint.insert(c.0 as usize);
                }
                ElementRef::Atom(a) => {
                    if !self.atom_is_live(a) {
                        return Err(Error::UnknownTarget);
                    }
                    fingerprint.union_with(&self.atom_fingerprint(a));
                }
                _ => return Err(Error::UnknownTarget),
            }
        }
        let id = AtomId(self.atoms.len() as u32);
        for c in fingerprint.iter() {
            self.constants[c].atoms.insert(id.0 as usize);
            self.const_rev[c] = self.rev_counter + 1;
        }
        self.bump();
        self.atoms.push(AtomEntry {
            fingerprint,
            alive: true,
        });
        self.live_atoms.insert(id.0 as usize);
        Ok(ElementRef::Atom(id))
    }

    pub fn atom_is_live(&self, a: AtomId) -> bool {
        self.live_atoms.contains(a.0 as usize)
    }

    /// Constants containing the atom. The bottom atom spans all of them.
    pub fn atom_fingerprint(&self, a: AtomId) -> BitSet {
        if a == BOTTOM_ATOM {
            return BitSet::from_indices(0..self.constants.len());
        }
        self.atoms[a.0 as usize].fingerprint.clone()
    }

    /// Live master atoms, bottom included.
    pub fn live_atom_set(&self) -> &BitSet {
        &self.live_atoms
    }

    /// Live learned atoms (bottom excluded).
    pub fn learned_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.live_atoms.iter().skip(1).map(|i| AtomId(i as u32))
    }

    /// GL^a(x) for a master element.
    pub fn master_atoms(&self, x: ElementRef) -> Result<BitSet> {
        match x {
            ElementRef::Constant(c) => Ok(self.constants[c.0 as usize].atoms.clone()),
            ElementRef::Term(t) => {
                let entry = &self.terms[t.0 as usize];
                let mut out = BitSet::new();
                for c in entry.components.iter() {
                    out.union_with(&self.constants[c].atoms);
                }
                Ok(out)
            }
            ElementRef::Atom(a) => {
                if !self.atom_is_live(a) {
                    return Err(Error::UnknownAtom);
                }
                Ok(BitSet::singleton(a.0 as usize))
            }
            _ => Err(Error::MixedAlgebras),
        }
    }

    /// Removes atoms from every atom set and the fingerprint table. The
    /// bottom atom is permanent and rejected.
    pub fn delete_atoms(&mut self, atoms: &[AtomId]) -> Result<()> {
        for &a in atoms {
            if a == BOTTOM_ATOM || !self.atom_is_live(a) {
                return Err(Error::UnknownAtom);
            }
        }
        for &a in atoms {
            let fingerprint = self.atoms[a.0 as usize].fingerprint.clone();
            for c in fingerprint.iter() {
                self.constants[c].atoms.remove(a.0 as usize);
                self.const_rev[c] = self.rev_counter + 1;
            }
            self.atoms[a.0 as usize].alive = false;
            self.live_atoms.remove(a.0 as usize);
        }
        self.bump();
        Ok(())
    }

    // ------------------------------------------------------------------ dual

    pub fn dual_of(&self, x: ElementRef) -> Result<ElementRef> {
        match x {
            ElementRef::Constant(c) => Ok(ElementRef::DualConstant(
                self.constants[c.0 as usize].dual,
            )),
            ElementRef::Term(t) => Ok(ElementRef::DualConstant(self.terms[t.0 as usize].dual)),
            ElementRef::Atom(a) => Ok(ElementRef::DualOfAtom(a)),
            _ => Err(Error::MixedAlgebras),
        }
    }

    pub(crate) fn dual_node_of(&self, x: ElementRef) -> Result<DualId> {
        match x {
            ElementRef::Constant(c) => Ok(self.constants[c.0 as usize].dual),
            ElementRef::Term(t) => {
                let e = &self.terms[t.0 as usize];
                if !e.alive {
                    return Err(Error::UnknownTarget);
                }
                Ok(e.dual)
            }
            _ => Err(Error::UnknownTarget),
        }
    }

    /// Inserts a fresh dual atom under every target dual constant and, by
    /// closure, everything above them in M*.
    pub fn add_dual_atom(&mut self, targets: &[ElementRef]) -> Result<ElementRef> {
        let mut nodes = Vec::new();
        for t in targets {
            match *t {
                ElementRef::DualConstant(d) if self.dual_is_live(d) => nodes.push(d),
                _ => return Err(Error::UnknownTarget),
            }
        }
        let id = DualAtomId(self.next_dual_atom);
        self.next_dual_atom += 1;
        self.live_dual_atoms.insert(id.0 as usize);
        for n in nodes {
            self.insert_dual_atom_upward(n, id);
        }
        self.dual_rev += 1;
        Ok(ElementRef::DualAtom(id))
    }

    /// Encodes a positive relation `lhs < rhs` as the reversed dual edge
    /// `[rhs] -> [lhs]`. Idempotent.
    pub fn add_dual_positive_edge(&mut self, rel: &Relation) -> Result<()> {
        debug_assert!(rel.is_positive());
        let from = self.dual_node_of(rel.rhs)?;
        let to = self.dual_node_of(rel.lhs)?;
        self.add_dual_edge(from, to);
        Ok(())
    }

    pub(crate) fn dual_is_live(&self, d: DualId) -> bool {
        self.dual
            .get(d.0 as usize)
            .map(|n| n.alive)
            .unwrap_or(false)
    }

    /// GL^a of a dual node: its materialized dual-atom set.
    pub(crate) fn dual_atoms(&self, d: DualId) -> &BitSet {
        &self.dual[d.0 as usize].atoms
    }

    /// GL^a([phi]) for a master atom: union of the dual sets of every
    /// constant containing it. Cached per dual revision.
    pub fn atom_dual_set(&self, a: AtomId) -> BitSet {
        {
            let caches = self.caches.borrow();
            if let Some(Some((rev, set))) = caches.atom_dual.get(a.0 as usize) {
                if *rev == self.dual_rev {
                    return set.clone();
                }
            }
        }
        let mut out = BitSet::new();
        out.insert(BOTTOM_DUAL_ATOM.0 as usize);
        let fingerprint = self.atom_fingerprint(a);
        for c in fingerprint.iter() {
            out.union_with(&self.dual[self.constants[c].dual.0 as usize].atoms);
        }
        let mut caches = self.caches.borrow_mut();
        if caches.atom_dual.len() < self.atoms.len() {
            caches.atom_dual.resize(self.atoms.len(), None);
        }
        caches.atom_dual[a.0 as usize] = Some((self.dual_rev, out.clone()));
        out
    }

    /// All live dual atoms, 0* included.
    pub fn live_dual_atom_set(&self) -> &BitSet {
        &self.live_dual_atoms
    }

    pub fn live_dual_atom_count(&self) -> usize {
        self.live_dual_atoms.len()
    }

    /// Removes dual atoms from every dual node set. 0* is permanent.
    pub fn delete_dual_atoms(&mut self, atoms: &[DualAtomId]) -> Result<()> {
        for &a in atoms {
            if a == BOTTOM_DUAL_ATOM || !self.live_dual_atoms.contains(a.0 as usize) {
                return Err(Error::UnknownAtom);
            }
        }
        for &a in atoms {
            self.live_dual_atoms.remove(a.0 as usize);
            for node in &mut self.dual {
                node.atoms.remove(a.0 as usize);
            }
        }
        self.dual_rev += 1;
        Ok(())
    }

    /// Dual constants at or below `d` (GL^c in M*).
    pub(crate) fn dual_downset(&self, d: DualId) -> Vec<DualId> {
        self.dual_reach(d, false)
    }

    /// Dual constants at or above `d`.
    pub(crate) fn dual_upset(&self, d: DualId) -> Vec<DualId> {
        self.dual_reach(d, true)
    }

    fn dual_reach(&self, start: DualId, upward: bool) -> Vec<DualId> {
        let mut seen = BitSet::singleton(start.0 as usize);
        let mut stack = vec![start];
        let mut out = vec![start];
        while let Some(n) = stack.pop() {
            let node = &self.dual[n.0 as usize];
            let next = if upward { &node.up } else { &node.down };
            for &m in next {
                if self.dual[m.0 as usize].alive && seen.insert(m.0 as usize) {
                    stack.push(m);
                    out.push(m);
                }
            }
        }
        out
    }

    fn new_dual_node(&mut self, kind: DualNodeKind) -> DualId {
        let id = DualId(self.dual.len() as u32);
        let mut atoms = BitSet::new();
        atoms.insert(BOTTOM_DUAL_ATOM.0 as usize);
        self.dual.push(DualNode {
            kind,
            up: Vec::new(),
            down: Vec::new(),
            atoms,
            alive: true,
        });
        self.dual_rev += 1;
        id
    }

    /// Adds `from -> to` in M* and propagates `from`'s dual atoms upward.
    /// Sets are monotone along edges, so when `from`'s atoms already sit in
    /// `to` the walk is skipped.
    pub(crate) fn add_dual_edge(&mut self, from: DualId, to: DualId) {
        if from == to || self.dual[from.0 as usize].up.contains(&to) {
            return;
        }
        self.dual[from.0 as usize].up.push(to);
        self.dual[to.0 as usize].down.push(from);
        if !self.dual[from.0 as usize]
            .atoms
            .is_subset(&self.dual[to.0 as usize].atoms)
        {
            let atoms = self.dual[from.0 as usize].atoms.clone();
            for node in self.dual_upset(to) {
                self.dual[node.0 as usize].atoms.union_with(&atoms);
            }
            self.dual_rev += 1;
        }
    }

    /// Inserts one dual atom at `node` and everything above it.
    pub(crate) fn insert_dual_atom_upward(&mut self, node: DualId, atom: DualAtomId) {
        for n in self.dual_upset(node) {
            self.dual[n.0 as usize].atoms.insert(atom.0 as usize);
        }
        self.dual_rev += 1;
    }

    /// Bulk version: one reachability walk for a whole set of dual atoms.
    pub(crate) fn insert_dual_atoms_upward(&mut self, node: DualId, atoms: &BitSet) {
        if atoms.is_empty() {
            return;
        }
        for n in self.dual_upset(node) {
            self.dual[n.0 as usize].atoms.union_with(atoms);
        }
        self.dual_rev += 1;
    }

    // ----------------------------------------------------------------- order

    /// The partial order: GL^a(a) is a subset of GL^a(b). Pure; both sides
    /// must live in the same algebra.
    pub fn leq(&self, a: ElementRef, b: ElementRef) -> Result<bool> {
        match (a.is_master(), b.is_master()) {
            (true, true) => Ok(self.master_atoms(a)?.is_subset(&self.master_atoms(b)?)),
            (false, false) => {
                let sa = self.dual_side_atoms(a)?;
                let sb = self.dual_side_atoms(b)?;
                Ok(sa.is_subset(&sb))
            }
            _ => Err(Error::MixedAlgebras),
        }
    }

    fn dual_side_atoms(&self, x: ElementRef) -> Result<BitSet> {
        match x {
            ElementRef::DualConstant(d) => {
                if !self.dual_is_live(d) {
                    return Err(Error::UnknownTarget);
                }
                Ok(self.dual[d.0 as usize].atoms.clone())
            }
            ElementRef::DualOfAtom(a) => {
                if !self.atom_is_live(a) {
                    return Err(Error::UnknownAtom);
                }
                Ok(self.atom_dual_set(a))
            }
            ElementRef::DualAtom(z) => {
                if !self.live_dual_atoms.contains(z.0 as usize) {
                    return Err(Error::UnknownAtom);
                }
                Ok(BitSet::singleton(z.0 as usize))
            }
            _ => Err(Error::MixedAlgebras),
        }
    }

    // ----------------------------------------------------------------- trace

    /// Tr(x): intersection of GL^a([phi]) over the atoms of x. For an atom
    /// this is its own dual-of-atom set. Constant traces are cached.
    pub fn trace(&self, x: ElementRef) -> Result<BitSet> {
        match x {
            ElementRef::Atom(a) => {
                if !self.atom_is_live(a) {
                    return Err(Error::UnknownAtom);
                }
                Ok(self.atom_dual_set(a))
            }
            ElementRef::Constant(c) => Ok(self.constant_trace(c)),
            ElementRef::Term(t) => {
                // Linearity: Tr of a merge is the intersection of the traces.
                let mut out: Option<BitSet> = None;
                for c in self.terms[t.0 as usize].components.iter() {
                    let tr = self.constant_trace(ConstantId(c as u32));
                    match &mut out {
                        None => out = Some(tr),
                        Some(acc) => acc.intersect_with(&tr),
                    }
                }
                Ok(out.unwrap_or_default())
            }
            _ => Err(Error::DualElementGiven),
        }
    }

    fn constant_trace(&self, c: ConstantId) -> BitSet {
        let stamp = self.const_rev[c.0 as usize];
        {
            let caches = self.caches.borrow();
            if let Some(Some((s, d, set))) = caches.constant_trace.get(c.0 as usize) {
                if *s == stamp && *d == self.dual_rev {
                    return set.clone();
                }
            }
        }
        let mut out = self.live_dual_atoms.clone();
        for a in self.constants[c.0 as usize].atoms.iter() {
            out.intersect_with(&self.atom_dual_set(AtomId(a as u32)));
            if out.len() <= 1 {
                break;
            }
        }
        let mut caches = self.caches.borrow_mut();
        if caches.constant_trace.len() < self.constants.len() {
            caches.constant_trace.resize(self.constants.len(), None);
        }
        caches.constant_trace[c.0 as usize] = Some((stamp, self.dual_rev, out.clone()));
        out
    }

    // ----------------------------------------------------------------- epoch

    /// Drops every term not listed, resets the dual graph to definitional
    /// edges only and clears all dual atoms except 0*. Master constants and
    /// atoms persist. Used by batch training, which rebuilds the dual
    /// scaffolding per epoch.
    pub fn begin_epoch(&mut self, keep_terms: &[TermId]) {
        let keep: BitSet = keep_terms.iter().map(|t| t.0 as usize).collect();
        self.dual.clear();
        self.live_dual_atoms = BitSet::singleton(0);
        self.next_dual_atom = 1;
        for i in 0..self.constants.len() {
            let dual = self.new_dual_node(DualNodeKind::OfConstant(ConstantId(i as u32)));
            self.constants[i].dual = dual;
        }
        for i in 0..self.terms.len() {
            if self.terms[i].alive && !keep.contains(i) {
                self.terms[i].alive = false;
                let key: Vec<u32> = self.terms[i].components.iter().map(|c| c as u32).collect();
                self.term_lookup.remove(&key);
            }
        }
        for i in 0..self.terms.len() {
            if !self.terms[i].alive {
                continue;
            }
            let dual = self.new_dual_node(DualNodeKind::OfTerm(TermId(i as u32)));
            self.terms[i].dual = dual;
            let comps: Vec<usize> = self.terms[i].components.to_vec();
            for c in comps {
                let cd = self.constants[c].dual;
                self.add_dual_edge(dual, cd);
            }
        }
        self.dual_rev += 1;
    }

    // ------------------------------------------------------------ validation

    /// Full-scan structural validator used by tests: bottom membership,
    /// fingerprint/GL^a cross-consistency and closure idempotence.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (i, c) in self.constants.iter().enumerate() {
            if !c.atoms.contains(0) {
                return Err(format!("constant {} misses the bottom atom", c.name));
            }
            for a in c.atoms.iter().skip(1) {
                let entry = &self.atoms[a];
                if !entry.alive {
                    return Err(format!("dead atom {a} still in constant {}", c.name));
                }
                if !entry.fingerprint.contains(i) {
                    return Err(format!("atom {a} in constant {} but not in fingerprint", i));
                }
            }
        }
        for a in self.live_atoms.iter().skip(1) {
            for c in self.atoms[a].fingerprint.iter() {
                if !self.constants[c].atoms.contains(a) {
                    return Err(format!("fingerprint of atom {a} not reflected at constant {c}"));
                }
            }
        }
        for node in &self.dual {
            if !node.alive {
                continue;
            }
            if !node.atoms.contains(0) {
                return Err(format!("dual node {:?} misses 0*", node.kind));
            }
            if !node.atoms.is_subset(&self.live_dual_atoms) {
                return Err(format!("dual node {:?} holds dead dual atoms", node.kind));
            }
        }
        // Closure idempotence: recomputing each node's dual set from its
        // downset changes nothing.
        for (i, node) in self.dual.iter().enumerate() {
            if !node.alive {
                continue;
            }
            let mut recomputed = BitSet::singleton(0);
            for d in self.dual_downset(DualId(i as u32)) {
                recomputed.union_with(&self.dual[d.0 as usize].atoms);
            }
            if recomputed != node.atoms {
                return Err(format!(
                    "dual closure not idempotent at node {:?}: {:?} vs {:?}",
                    node.kind, recomputed, node.atoms
                ));
            }
        }
        Ok(())
    }

    fn bump(&mut self) -> u64 {
        self.rev_counter += 1;
        self.rev_counter
    }
}

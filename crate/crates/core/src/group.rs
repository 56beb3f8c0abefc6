//! Finite groups as explicit multiplication tables.
//!
//! Every constructor produces a [`GroupTable`] whose element indices are
//! canonical: the identity is index 0, cyclic elements are residues, dihedral
//! elements are rotations `(a,0)` followed by reflections `(a,1)`, and
//! permutation groups list their elements in lexicographic order of the image
//! arrays. Permutations compose right to left: `(p·q)(x) = p(q(x))`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Order cap applied by [`build_group`] (`|S₇|`).
pub const DEFAULT_MAX_ORDER: usize = 5040;

/// Parsed description of a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    ElementaryAbelian2(usize),
    DirectProduct(Box<GroupSpec>, Box<GroupSpec>),
    /// Generators as 0-based image arrays on a common domain.
    PermGens(Vec<Vec<usize>>),
}

impl GroupSpec {
    /// Order implied by the group description, when it can be read off without building.
    /// `None` on overflow or for permutation generators.
    pub fn order_hint(&self) -> Option<usize> {
        match self {
            GroupSpec::Cyclic(n) => Some(*n),
            GroupSpec::Dihedral(n) => n.checked_mul(2),
            GroupSpec::Symmetric(n) => (1..=*n).try_fold(1usize, |acc, i| acc.checked_mul(i)),
            GroupSpec::ElementaryAbelian2(n) => 1usize.checked_shl(u32::try_from(*n).ok()?),
            GroupSpec::DirectProduct(a, b) => a.order_hint()?.checked_mul(b.order_hint()?),
            GroupSpec::PermGens(_) => None,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "Z:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "S:{n}"),
            GroupSpec::ElementaryAbelian2(n) => write!(f, "Z2^{n}"),
            GroupSpec::DirectProduct(a, b) => write!(f, "prod({a},{b})"),
            GroupSpec::PermGens(gens) => {
                let parts: Vec<String> = gens.iter().map(|p| cycle_notation(p)).collect();
                write!(f, "perm[{}]", parts.join(", "))
            }
        }
    }
}

/// Which constructor produced a table; drives the explicit irrep constructions.
#[derive(Clone, Debug)]
pub enum Family {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    ElementaryAbelian2(usize),
    Product(Box<GroupTable>, Box<GroupTable>),
    Permutation,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Cyclic(_) => "cyclic",
            Family::Dihedral(_) => "dihedral",
            Family::Symmetric(_) => "symmetric",
            Family::ElementaryAbelian2(_) => "elementary abelian 2-group",
            Family::Product(..) => "direct product",
            Family::Permutation => "permutation group",
        }
    }
}

/// A finite group with its full multiplication table.
#[derive(Clone, Debug)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
    labels: Vec<String>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    family: Family,
    // image arrays, one per element, for groups built as permutation groups
    action: Option<Vec<Vec<usize>>>,
    spec: GroupSpec,
}

pub fn build_group(spec: &GroupSpec) -> Result<GroupTable> {
    build_group_with_cap(spec, DEFAULT_MAX_ORDER)
}

pub fn build_group_with_cap(spec: &GroupSpec, max_order: usize) -> Result<GroupTable> {
    if let Some(order) = spec.order_hint() {
        if order > max_order {
            return Err(Error::OrderTooLarge { order, max: max_order });
        }
    } else if !matches!(spec, GroupSpec::PermGens(_)) {
        return Err(Error::OrderTooLarge {
            order: usize::MAX,
            max: max_order,
        });
    }
    match spec {
        GroupSpec::Cyclic(n) => {
            require_positive(*n, "Z")?;
            Ok(cyclic(*n))
        }
        GroupSpec::Dihedral(n) => {
            require_positive(*n, "D")?;
            Ok(dihedral(*n))
        }
        GroupSpec::Symmetric(n) => {
            require_positive(*n, "S")?;
            Ok(symmetric(*n))
        }
        GroupSpec::ElementaryAbelian2(n) => {
            require_positive(*n, "Z2^")?;
            Ok(elementary_abelian2(*n))
        }
        GroupSpec::DirectProduct(a, b) => {
            let ga = build_group_with_cap(a, max_order)?;
            let gb = build_group_with_cap(b, max_order)?;
            let order = ga.order * gb.order;
            if order > max_order {
                return Err(Error::OrderTooLarge { order, max: max_order });
            }
            Ok(direct_product(ga, gb, spec.clone()))
        }
        GroupSpec::PermGens(gens) => permutation_group(gens, max_order, spec.clone()),
    }
}

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Spec(format!("{what} needs n >= 1")));
    }
    Ok(())
}

fn cyclic(n: usize) -> GroupTable {
    GroupTable::assemble(
        n,
        |a, b| (a + b) % n,
        (0..n).map(|a| a.to_string()).collect(),
        Family::Cyclic(n),
        None,
        GroupSpec::Cyclic(n),
    )
}

fn dihedral(n: usize) -> GroupTable {
    // index a + n·f stands for r^a s^f, with s r s = r^-1
    let mul = move |x: usize, y: usize| {
        let (a, f) = (x % n, x / n);
        let (b, e) = (y % n, y / n);
        let b = if f == 0 { b } else { (n - b) % n };
        (a + b) % n + n * (f ^ e)
    };
    let labels = (0..2 * n).map(|x| format!("({},{})", x % n, x / n)).collect();
    GroupTable::assemble(2 * n, mul, labels, Family::Dihedral(n), None, GroupSpec::Dihedral(n))
}

fn elementary_abelian2(n: usize) -> GroupTable {
    let order = 1usize << n;
    let labels = (0..order).map(|x| format!("{x:0n$b}")).collect();
    GroupTable::assemble(
        order,
        |a, b| a ^ b,
        labels,
        Family::ElementaryAbelian2(n),
        None,
        GroupSpec::ElementaryAbelian2(n),
    )
}

fn symmetric(n: usize) -> GroupTable {
    let perms = all_permutations(n);
    let mul = |a: usize, b: usize| {
        let (p, q) = (&perms[a], &perms[b]);
        let composed: Vec<usize> = q.iter().map(|&x| p[x]).collect();
        lehmer_rank(&composed)
    };
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    GroupTable::assemble(
        perms.len(),
        mul,
        labels,
        Family::Symmetric(n),
        Some(perms.clone()),
        GroupSpec::Symmetric(n),
    )
}

fn direct_product(a: GroupTable, b: GroupTable, spec: GroupSpec) -> GroupTable {
    let nb = b.order;
    let order = a.order * nb;
    let labels = (0..order)
        .map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb]))
        .collect();
    let table = {
        let (a, b) = (&a, &b);
        let mut mul = vec![0u32; order * order];
        for x in 0..order {
            for y in 0..order {
                mul[x * order + y] =
                    (a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)) as u32;
            }
        }
        mul
    };
    GroupTable::assemble(
        order,
        |x, y| table[x * order + y] as usize,
        labels,
        Family::Product(Box::new(a), Box::new(b)),
        None,
        spec,
    )
}

fn permutation_group(gens: &[Vec<usize>], max_order: usize, spec: GroupSpec) -> Result<GroupTable> {
    let degree = gens.first().map_or(1, |g| g.len());
    for g in gens {
        if g.len() != degree {
            return Err(Error::Spec(format!(
                "permutation generators act on domains of different sizes ({} vs {degree})",
                g.len()
            )));
        }
        let mut seen = vec![false; degree];
        for &x in g {
            if x >= degree || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Spec(format!("{g:?} is not a permutation of 0..{degree}")));
            }
        }
    }
    let id: Vec<usize> = (0..degree).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q: Vec<usize> = g.iter().map(|&x| p[x]).collect();
            if seen.insert(q.clone()) {
                if seen.len() > max_order {
                    return Err(Error::OrderTooLarge {
                        order: seen.len(),
                        max: max_order,
                    });
                }
                queue.push_back(q);
            }
        }
    }
    let mut perms: Vec<Vec<usize>> = seen.into_iter().collect();
    perms.sort();
    let index: HashMap<&[usize], usize> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mul = |a: usize, b: usize| {
        let composed: Vec<usize> = perms[b].iter().map(|&x| perms[a][x]).collect();
        index[composed.as_slice()]
    };
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    Ok(GroupTable::assemble(
        perms.len(),
        mul,
        labels,
        Family::Permutation,
        Some(perms.clone()),
        spec,
    ))
}

impl GroupTable {
    fn assemble(
        order: usize,
        mul_fn: impl Fn(usize, usize) -> usize,
        labels: Vec<String>,
        family: Family,
        action: Option<Vec<Vec<usize>>>,
        spec: GroupSpec,
    ) -> GroupTable {
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                mul[a * order + b] = mul_fn(a, b) as u32;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e * order + g] as usize == g))
            .expect("table has no identity");
        let mut inverse = vec![usize::MAX; order];
        for a in 0..order {
            inverse[a] = (0..order)
                .find(|&b| mul[a * order + b] as usize == identity)
                .expect("element without inverse");
        }
        let mut class_of = vec![usize::MAX; order];
        let mut classes = Vec::new();
        for g in 0..order {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for x in 0..order {
                let c = mul[mul[x * order + g] as usize * order + inverse[x]] as usize;
                if class_of[c] == usize::MAX {
                    class_of[c] = id;
                    members.push(c);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        GroupTable {
            order,
            mul,
            identity,
            inverse,
            labels,
            classes,
            class_of,
            family,
            action,
            spec,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `c g c⁻¹`.
    pub fn conjugate(&self, g: usize, c: usize) -> usize {
        self.mul(self.mul(c, g), self.inverse(c))
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Conjugacy classes, ordered by smallest member; class 0 is `{identity}`.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Image array of `g` for groups built from permutations.
    pub fn permutation(&self, g: usize) -> Option<&[usize]> {
        self.action.as_ref().map(|a| a[g].as_slice())
    }

    /// Size of the permuted domain, if any.
    pub fn degree(&self) -> Option<usize> {
        self.action.as_ref().map(|a| a[0].len())
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    /// Full triple-loop associativity check.
    pub fn is_associative(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }

    /// Looks up an element by its label, tolerating whitespace differences and
    /// non-canonical cycle notation for permutation groups.
    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        let squashed: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(i) = self
            .labels
            .iter()
            .position(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<String>() == squashed)
        {
            return Some(i);
        }
        match &self.family {
            Family::Product(a, b) => {
                let inner = squashed.strip_prefix('(')?.strip_suffix(')')?;
                let parts = split_top_level(inner, ',');
                if parts.len() != 2 {
                    return None;
                }
                let x = a.element_by_label(parts[0])?;
                let y = b.element_by_label(parts[1])?;
                Some(x * b.order() + y)
            }
            _ => {
                let degree = self.degree()?;
                let p = parse_cycles(label, degree).ok()?;
                let perms = self.action.as_ref()?;
                perms.iter().position(|q| *q == p)
            }
        }
    }
}

/// Splits at `sep` occurrences that sit outside any bracket pair.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// 1-based cycle notation, omitting fixed points; `()` for the identity.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = p[x];
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Parses 1-based cycle notation such as `(1 2)(3 4)` into an image array on
/// `degree` points. Cycles compose right to left.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<usize>> {
    let cycles = parse_cycle_lists(s)?;
    let mut p: Vec<usize> = (0..degree).collect();
    for cycle in cycles.iter().rev() {
        let mut seen = HashSet::new();
        for &x in cycle {
            if x == 0 || x > degree {
                return Err(Error::Spec(format!("point {x} outside 1..={degree}")));
            }
            if !seen.insert(x) {
                return Err(Error::Spec(format!("point {x} repeated in a cycle")));
            }
        }
        let mut c: Vec<usize> = (0..degree).collect();
        for w in 0..cycle.len() {
            c[cycle[w] - 1] = cycle[(w + 1) % cycle.len()] - 1;
        }
        p = p.iter().map(|&x| c[x]).collect();
    }
    Ok(p)
}

/// Raw cycles (1-based points) from a string of parenthesised groups.
pub fn parse_cycle_lists(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Spec(format!("expected '(' in cycle notation {s:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| Error::Spec(format!("unclosed cycle in {s:?}")))?;
        let points = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Spec(format!("bad point {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

fn lehmer_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// A subgroup, stored as its sorted member list.
#[derive(Clone, Debug)]
pub struct Subgroup<'g> {
    group: &'g GroupTable,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl PartialEq for Subgroup<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.group, other.group) && self.members == other.members
    }
}

impl Eq for Subgroup<'_> {}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure<'g>(g: &'g GroupTable, gens: &[usize]) -> Subgroup<'g> {
    let mut mask = vec![false; g.order()];
    mask[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !mask[y] {
                mask[y] = true;
                queue.push_back(y);
            }
        }
    }
    Subgroup::from_mask(g, mask)
}

impl<'g> Subgroup<'g> {
    fn from_mask(group: &'g GroupTable, mask: Vec<bool>) -> Self {
        let members = (0..group.order()).filter(|&x| mask[x]).collect();
        Subgroup { group, members, mask }
    }

    pub fn trivial(group: &'g GroupTable) -> Self {
        subgroup_closure(group, &[])
    }

    pub fn whole(group: &'g GroupTable) -> Self {
        Subgroup::from_mask(group, vec![true; group.order()])
    }

    /// Accepts `members` only if they already form a subgroup.
    pub fn from_members(group: &'g GroupTable, members: &[usize]) -> Result<Self> {
        let mut mask = vec![false; group.order()];
        for &m in members {
            if m >= group.order() {
                return Err(Error::Domain(format!("element {m} out of range")));
            }
            mask[m] = true;
        }
        let h = Subgroup::from_mask(group, mask);
        let closed = h.members.contains(&group.identity())
            && h.members
                .iter()
                .all(|&a| h.members.iter().all(|&b| h.mask[group.mul(a, b)]));
        if !closed {
            return Err(Error::Domain("member set is not closed under multiplication".into()));
        }
        Ok(h)
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.order()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mask[g]
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    /// Left cosets `cH`, each sorted, listed by minimal representative.
    pub fn left_cosets(&self) -> Vec<Vec<usize>> {
        let g = self.group;
        let mut covered = vec![false; g.order()];
        let mut cosets = Vec::with_capacity(self.index());
        for c in 0..g.order() {
            if covered[c] {
                continue;
            }
            let mut coset: Vec<usize> = self.members.iter().map(|&h| g.mul(c, h)).collect();
            coset.sort_unstable();
            for &x in &coset {
                covered[x] = true;
            }
            cosets.push(coset);
        }
        cosets
    }

    /// `c H c⁻¹`.
    pub fn conjugate(&self, c: usize) -> Subgroup<'g> {
        let g = self.group;
        let mut mask = vec![false; g.order()];
        for &h in &self.members {
            mask[g.conjugate(h, c)] = true;
        }
        Subgroup::from_mask(g, mask)
    }

    pub fn is_normal(&self) -> bool {
        let g = self.group;
        self.members
            .iter()
            .all(|&h| g.classes()[g.class_of(h)].iter().all(|&x| self.mask[x]))
    }

    /// Whether the subgroup acts transitively on the permuted domain.
    pub fn is_transitive(&self) -> Result<bool> {
        let g = self.group;
        let degree = g.degree().ok_or_else(|| {
            Error::Domain(format!(
                "transitivity needs a permutation action; {} carries none",
                g.family().name()
            ))
        })?;
        let mut reached = vec![false; degree];
        reached[0] = true;
        for &h in &self.members {
            reached[g.permutation(h).unwrap()[0]] = true;
        }
        Ok(reached.iter().all(|&r| r))
    }

    /// `|H ∩ K|`.
    pub fn intersection_order(&self, other: &Subgroup<'_>) -> usize {
        self.members.iter().filter(|&&x| other.mask[x]).count()
    }
}

/// Every subgroup of `g`, sorted by (order, members).
pub fn all_subgroups(g: &GroupTable) -> Vec<Subgroup<'_>> {
    let mut seeds: Vec<(Subgroup<'_>, Vec<usize>)> = Vec::new();
    for x in 0..g.order() {
        let c = subgroup_closure(g, &[x]);
        if !seeds.iter().any(|(s, _)| *s == c) {
            seeds.push((c, vec![x]));
        }
    }
    let atoms: Vec<Vec<usize>> = seeds.iter().map(|(_, gens)| gens.clone()).collect();
    join_closure(g, seeds, &atoms)
}

/// Normal subgroups of `g`, built as joins of normal closures of classes.
pub fn normal_subgroups(g: &GroupTable) -> Vec<Subgroup<'_>> {
    let mut seeds: Vec<(Subgroup<'_>, Vec<usize>)> = Vec::new();
    for class in g.classes() {
        let s = subgroup_closure(g, class);
        if !seeds.iter().any(|(t, _)| *t == s) {
            seeds.push((s, class.clone()));
        }
    }
    let atoms: Vec<Vec<usize>> = seeds.iter().map(|(_, gens)| gens.clone()).collect();
    join_closure(g, seeds, &atoms)
}

// Closes `seeds` under joins with the subgroups generated by each atom.
fn join_closure<'g>(
    g: &'g GroupTable,
    seeds: Vec<(Subgroup<'g>, Vec<usize>)>,
    atoms: &[Vec<usize>],
) -> Vec<Subgroup<'g>> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut result = Vec::new();
    let mut queue: VecDeque<(Subgroup<'g>, Vec<usize>)> = seeds.into_iter().collect();
    while let Some((s, gens)) = queue.pop_front() {
        if !seen.insert(s.members().to_vec()) {
            continue;
        }
        for atom in atoms {
            if atom.iter().all(|&a| s.contains(a)) {
                continue;
            }
            let mut joined = gens.clone();
            joined.extend_from_slice(atom);
            let t = subgroup_closure(g, &joined);
            if !seen.contains(t.members()) {
                queue.push_back((t, joined));
            }
        }
        result.push(s);
    }
    result.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_classes(g: &GroupTable) -> usize {
        let mut reps: Vec<Vec<usize>> = Vec::new();
        for x in 0..g.order() {
            let mut class: Vec<usize> = (0..g.order()).map(|c| g.conjugate(x, c)).collect();
            class.sort_unstable();
            class.dedup();
            if !reps.contains(&class) {
                reps.push(class);
            }
        }
        reps.len()
    }

    #[test]
    fn trivial_cyclic_group() {
        let g = build_group(&GroupSpec::Cyclic(1)).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.is_associative());
        assert_eq!(g.num_classes(), 1);
    }

    #[test]
    fn class_counts_match_brute_force() {
        for (spec, classes) in [
            (GroupSpec::Dihedral(4), 5),
            (GroupSpec::Symmetric(3), 3),
            (GroupSpec::Symmetric(4), 5),
            (GroupSpec::Dihedral(5), 4),
            (GroupSpec::ElementaryAbelian2(3), 8),
        ] {
            let g = build_group(&spec).unwrap();
            assert!(g.is_associative(), "{spec}");
            assert_eq!(g.num_classes(), classes, "{spec}");
            assert_eq!(brute_force_classes(&g), classes, "{spec}");
            let total: usize = g.classes().iter().map(Vec::len).sum();
            assert_eq!(total, g.order());
        }
    }

    #[test]
    fn canonical_indices() {
        let d4 = build_group(&GroupSpec::Dihedral(4)).unwrap();
        assert_eq!(d4.identity(), 0);
        assert_eq!(d4.label(1), "(1,0)");
        assert_eq!(d4.label(4), "(0,1)");
        let s3 = build_group(&GroupSpec::Symmetric(3)).unwrap();
        assert_eq!(s3.label(0), "()");
        assert_eq!(s3.element_by_label("(2 1)"), s3.element_by_label("(1 2)"));
    }

    #[test]
    fn order_cap_is_enforced() {
        let err = build_group(&GroupSpec::Symmetric(8)).unwrap_err();
        assert!(matches!(err, Error::OrderTooLarge { order: 40320, .. }));
        let err = build_group_with_cap(&GroupSpec::Dihedral(10), 16).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn mismatched_permutation_domains() {
        let spec = GroupSpec::PermGens(vec![vec![1, 0, 2], vec![1, 0]]);
        assert!(matches!(build_group(&spec), Err(Error::Spec(_))));
    }

    #[test]
    fn closure_examples() {
        let d4 = build_group(&GroupSpec::Dihedral(4)).unwrap();
        assert_eq!(subgroup_closure(&d4, &[d4.identity()]).order(), 1);
        let flip = d4.element_by_label("(0,1)").unwrap();
        let h = subgroup_closure(&d4, &[flip]);
        assert_eq!(h.members(), &[0, flip]);

        let s4 = build_group(&GroupSpec::Symmetric(4)).unwrap();
        let a = s4.element_by_label("(1 2)(3 4)").unwrap();
        let b = s4.element_by_label("(1 3)(2 4)").unwrap();
        let v4 = subgroup_closure(&s4, &[a, b]);
        // brute force: the closure is {e, a, b, ab}
        let mut expected = vec![0, a, b, s4.mul(a, b)];
        expected.sort_unstable();
        assert_eq!(v4.members(), expected.as_slice());
        assert!(v4.is_normal());
    }

    #[test]
    fn cosets_partition() {
        let d4 = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let flip = d4.element_by_label("(0,1)").unwrap();
        let h = subgroup_closure(&d4, &[flip]);
        let cosets = h.left_cosets();
        assert_eq!(cosets.len(), 4);
        let mut all: Vec<usize> = cosets.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
        for c in &cosets {
            let expected: HashSet<usize> = h.members().iter().map(|&x| d4.mul(c[0], x)).collect();
            assert_eq!(c.iter().copied().collect::<HashSet<_>>(), expected);
        }
        assert_eq!(Subgroup::whole(&d4).left_cosets().len(), 1);
        assert_eq!(Subgroup::trivial(&d4).left_cosets().len(), 8);
    }

    #[test]
    fn conjugation_examples() {
        let d4 = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let flip = d4.element_by_label("(0,1)").unwrap();
        let rot = d4.element_by_label("(1,0)").unwrap();
        let h = subgroup_closure(&d4, &[flip]);
        assert_eq!(h.conjugate(d4.identity()), h);
        let c = h.conjugate(rot);
        // r s r⁻¹ = r² s
        assert_eq!(c.members(), &[0, d4.element_by_label("(2,1)").unwrap()]);
        let center = subgroup_closure(&d4, &[d4.element_by_label("(2,0)").unwrap()]);
        assert!(center.is_normal());
        for x in 0..8 {
            assert_eq!(center.conjugate(x), center);
        }
    }

    #[test]
    fn normality_and_transitivity() {
        let s3 = build_group(&GroupSpec::Symmetric(3)).unwrap();
        let t = Subgroup::trivial(&s3);
        assert!(t.is_normal());
        assert!(!t.is_transitive().unwrap());
        let a3 = subgroup_closure(&s3, &[s3.element_by_label("(1 2 3)").unwrap()]);
        assert!(a3.is_normal());
        assert!(a3.is_transitive().unwrap());
        let h = subgroup_closure(&s3, &[s3.element_by_label("(1 2)").unwrap()]);
        assert!(!h.is_normal());
        let c = s3.element_by_label("(1 3)").unwrap();
        assert_ne!(h.conjugate(c), h);

        let d4 = build_group(&GroupSpec::Dihedral(4)).unwrap();
        assert!(matches!(Subgroup::whole(&d4).is_transitive(), Err(Error::Domain(_))));
    }

    #[test]
    fn subgroup_lattice_counts() {
        // known counts: S3 → 6, D4 → 10, S4 → 30, Z2^3 → 16
        for (spec, n) in [
            (GroupSpec::Symmetric(3), 6),
            (GroupSpec::Dihedral(4), 10),
            (GroupSpec::Symmetric(4), 30),
            (GroupSpec::ElementaryAbelian2(3), 16),
        ] {
            let g = build_group(&spec).unwrap();
            assert_eq!(all_subgroups(&g).len(), n, "{spec}");
        }
    }

    #[test]
    fn normal_subgroups_match_class_union_search() {
        for spec in [
            GroupSpec::Symmetric(4),
            GroupSpec::Dihedral(6),
            GroupSpec::ElementaryAbelian2(3),
            GroupSpec::DirectProduct(Box::new(GroupSpec::Cyclic(2)), Box::new(GroupSpec::Symmetric(3))),
        ] {
            let g = build_group(&spec).unwrap();
            // oracle: unions of classes containing the identity that are closed
            let r = g.num_classes();
            let mut oracle: Vec<Vec<usize>> = Vec::new();
            for bits in 0u64..(1 << (r - 1)) {
                let mut members: Vec<usize> = g.classes()[0].clone();
                for c in 1..r {
                    if bits >> (c - 1) & 1 == 1 {
                        members.extend_from_slice(&g.classes()[c]);
                    }
                }
                if g.order() % members.len() != 0 {
                    continue;
                }
                members.sort_unstable();
                if Subgroup::from_members(&g, &members).is_ok() {
                    oracle.push(members);
                }
            }
            oracle.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            let found: Vec<Vec<usize>> =
                normal_subgroups(&g).iter().map(|s| s.members().to_vec()).collect();
            assert_eq!(found, oracle, "{spec}");
        }
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = parse_cycles("(1 2 3)(4 5)", 5).unwrap();
        assert_eq!(p, vec![1, 2, 0, 4, 3]);
        assert_eq!(cycle_notation(&p), "(1 2 3)(4 5)");
        assert!(parse_cycles("(1 1)", 3).is_err());
        assert!(parse_cycles("(1 4)", 3).is_err());
    }

    #[test]
    fn product_labels_resolve() {
        let spec = GroupSpec::DirectProduct(Box::new(GroupSpec::Dihedral(3)), Box::new(GroupSpec::Cyclic(2)));
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 12);
        let x = g.element_by_label("((1,0), 1)").unwrap();
        assert_eq!(g.label(x), "((1,0),1)");
    }
}

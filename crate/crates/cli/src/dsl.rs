//! Group, subgroup and irreducible selectors as typed on the command line.
//!
//! Groups: `Z:n`, `D:n`, `S:n`, `Z2^n`, `prod(a,b)`, `perm[(1 2)(3 4), (1 3)]`.

use harmonic_sieve::characters::CharacterTable;
use harmonic_sieve::group::{parse_cycle_lists, parse_cycles, split_top_level, Family, GroupSpec, GroupTable, Subgroup};
use harmonic_sieve::group::subgroup_closure;
use harmonic_sieve::harmonics::find_missing_harmonics;

use crate::CliError;

pub fn parse_group_spec(s: &str) -> Result<GroupSpec, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("malformed group spec {s:?}"));
    let number = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());

    if let Some(n) = s.strip_prefix("Z2^") {
        return Ok(GroupSpec::ElementaryAbelian2(number(n)?));
    }
    if let Some(n) = s.strip_prefix("Z:") {
        return Ok(GroupSpec::Cyclic(number(n)?));
    }
    if let Some(n) = s.strip_prefix("D:") {
        return Ok(GroupSpec::Dihedral(number(n)?));
    }
    if let Some(n) = s.strip_prefix("S:") {
        return Ok(GroupSpec::Symmetric(number(n)?));
    }
    if let Some(inner) = s.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
        let parts = split_top_level(inner, ',');
        if parts.len() != 2 {
            return Err(CliError::Usage(format!("prod(..) takes two factors, got {s:?}")));
        }
        return Ok(GroupSpec::DirectProduct(
            Box::new(parse_group_spec(parts[0])?),
            Box::new(parse_group_spec(parts[1])?),
        ));
    }
    if let Some(inner) = s.strip_prefix("perm[").and_then(|r| r.strip_suffix(']')) {
        let gens: Vec<&str> = split_top_level(inner, ',').into_iter().filter(|t| !t.is_empty()).collect();
        if gens.is_empty() {
            return Err(CliError::Usage(format!("perm[..] needs at least one generator in {s:?}")));
        }
        let mut degree = 1;
        for g in &gens {
            let cycles = parse_cycle_lists(g).map_err(|e| CliError::Usage(e.to_string()))?;
            degree = cycles.iter().flatten().fold(degree, |d, &x| d.max(x));
        }
        let perms = gens
            .iter()
            .map(|g| parse_cycles(g, degree).map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(GroupSpec::PermGens(perms));
    }
    Err(bad())
}

/// `trivial`, `all`, or comma-separated generators by label. Dihedral groups
/// also accept `flip` and `rot`.
pub fn parse_subgroup<'g>(g: &'g GroupTable, s: &str) -> Result<Subgroup<'g>, CliError> {
    let s = s.trim();
    match s {
        "" | "trivial" => return Ok(Subgroup::trivial(g)),
        "all" | "whole" => return Ok(Subgroup::whole(g)),
        _ => {}
    }
    let gens = split_top_level(s, ',')
        .into_iter()
        .map(|label| element(g, label))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(subgroup_closure(g, &gens))
}

fn element(g: &GroupTable, label: &str) -> Result<usize, CliError> {
    let alias = match (label, g.family()) {
        ("flip", Family::Dihedral(_)) => Some("(0,1)"),
        ("rot", Family::Dihedral(_)) => Some("(1,0)"),
        _ => None,
    };
    let label = alias.unwrap_or(label);
    g.element_by_label(label)
        .ok_or_else(|| CliError::Usage(format!("no element labelled {label:?} in {}", g.spec())))
}

pub fn parse_irrep(ct: &CharacterTable<'_>, s: &str) -> Result<usize, CliError> {
    ct.lookup(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown irreducible {s:?}; use trivial, sign, standard, chi<i> or an index below {}",
            ct.num_irreps()
        ))
    })
}

/// `auto` picks the first missing harmonic of `h` in table order. For the
/// trivial subgroup, which misses nothing, it picks the first nontrivial
/// irreducible.
pub fn resolve_eta(ct: &CharacterTable<'_>, h: &Subgroup<'_>, s: &str) -> Result<usize, CliError> {
    if s.trim() != "auto" {
        return parse_irrep(ct, s);
    }
    if let Some(&eta) = find_missing_harmonics(ct, h).missing.first() {
        return Ok(eta);
    }
    if h.is_trivial() && ct.num_irreps() > 1 {
        return Ok(1);
    }
    Err(CliError::Usage(format!(
        "subgroup of order {} has no missing harmonic; pass --eta explicitly",
        h.order()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use harmonic_sieve::group::build_group;

    #[test]
    fn parses_every_form() {
        assert_eq!(parse_group_spec("Z:5").unwrap(), GroupSpec::Cyclic(5));
        assert_eq!(parse_group_spec(" D:4 ").unwrap(), GroupSpec::Dihedral(4));
        assert_eq!(parse_group_spec("S:3").unwrap(), GroupSpec::Symmetric(3));
        assert_eq!(parse_group_spec("Z2^3").unwrap(), GroupSpec::ElementaryAbelian2(3));
        assert_eq!(
            parse_group_spec("prod(Z:2,prod(D:3,Z:2))").unwrap(),
            GroupSpec::DirectProduct(
                Box::new(GroupSpec::Cyclic(2)),
                Box::new(GroupSpec::DirectProduct(Box::new(GroupSpec::Dihedral(3)), Box::new(GroupSpec::Cyclic(2))))
            )
        );
        assert_eq!(
            parse_group_spec("perm[(1 2)(3 4), (1 3)]").unwrap(),
            GroupSpec::PermGens(vec![vec![1, 0, 3, 2], vec![2, 1, 0, 3]])
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["Z:5", "D:4", "S:3", "Z2^3", "prod(Z:2,S:3)", "perm[(1 2)(3 4), (1 3)]"] {
            let spec = parse_group_spec(s).unwrap();
            assert_eq!(parse_group_spec(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in ["Q:8!", "Z:", "D:x", "prod(Z:2)", "perm[]", "perm[(1 2]", "S3"] {
            assert!(matches!(parse_group_spec(s), Err(CliError::Usage(_))), "{s}");
        }
    }

    #[test]
    fn subgroup_aliases() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        assert_eq!(parse_subgroup(&g, "flip").unwrap().order(), 2);
        assert_eq!(parse_subgroup(&g, "rot").unwrap().order(), 4);
        assert_eq!(parse_subgroup(&g, "rot, flip").unwrap().order(), 8);
        assert!(parse_subgroup(&g, "trivial").unwrap().is_trivial());
        assert!(parse_subgroup(&g, "(9,0)").is_err());

        let s = build_group(&GroupSpec::Symmetric(3)).unwrap();
        assert_eq!(parse_subgroup(&s, "(1 2 3)").unwrap().order(), 3);
    }

    #[test]
    fn auto_eta() {
        let g = build_group(&GroupSpec::Dihedral(4)).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let flip = parse_subgroup(&g, "flip").unwrap();
        let eta = resolve_eta(&ct, &flip, "auto").unwrap();
        assert!(find_missing_harmonics(&ct, &flip).missing.contains(&eta));
        assert_eq!(resolve_eta(&ct, &Subgroup::trivial(&g), "auto").unwrap(), 1);
        assert_eq!(resolve_eta(&ct, &flip, "sign").unwrap(), ct.lookup("sign").unwrap());
        assert!(resolve_eta(&ct, &flip, "nope").is_err());
    }
}

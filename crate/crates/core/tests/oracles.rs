mod common;

use num_bigint::BigInt;
use stabring::oracle::{bar_homology, h1_matches, stable_count_prediction};
use stabring::ring::build_ring;

use common::{group, HOPF_FIXTURES};

#[test]
fn schur_multipliers_match_hopf_fixtures() {
    for (name, presentation, schur) in HOPF_FIXTURES {
        let g = group(name);
        let h = bar_homology(&g).unwrap();
        let want: Vec<BigInt> = schur.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(h.h2.torsion, want, "{name} {presentation}");
        assert_eq!(h.h2.free_rank, 0);
        assert!(h1_matches(&h.h1, &g.abelianization_invariants()), "{name}");
    }
}

#[test]
fn klein_prediction_breakdown() {
    let p = stable_count_prediction(&group("klein")).unwrap();
    let mut by_order: Vec<(usize, BigInt)> = p.terms.iter().map(|t| (t.order, t.schur.clone())).collect();
    by_order.sort();
    let expect: Vec<(usize, BigInt)> = [(1, 1), (2, 1), (2, 1), (2, 1), (4, 2)]
        .into_iter()
        .map(|(o, s)| (o, BigInt::from(s)))
        .collect();
    assert_eq!(by_order, expect);
}

// Past the unstable range, orbits of non-abelian groups also separate by
// the boundary value, which lies in the derived subgroup of the image.
#[test]
fn nonabelian_counts_match_bordered_prediction() {
    for (name, n) in [("s3", 3), ("q8", 3)] {
        let g = group(name);
        let r = build_ring(&g, n, 2, 1 << 32).unwrap();
        let p = stable_count_prediction(&g).unwrap();
        assert_eq!(BigInt::from(r.count(n).unwrap()), p.bordered, "{name}");
        assert!(p.bordered > p.marked);
    }
}

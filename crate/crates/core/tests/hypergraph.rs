mod common;

use kkm_core::hypergraph::{Hypergraph, HypergraphJson};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_fractional, brute_nu, brute_tau, random_hypergraph, random_partite, to_q};

fn fano() -> Vec<Vec<usize>> {
    vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6], vec![1, 3, 5], vec![1, 4, 6], vec![2, 3, 6], vec![2, 4, 5]]
}

#[test]
fn fano_plane() {
    let h = Hypergraph::new(7, fano()).unwrap();
    assert_eq!(h.matching_number().unwrap(), 1);
    assert_eq!(h.covering_number().unwrap(), 3);
    let star = to_q(&h.fractional_matching_number().unwrap());
    assert_eq!(star, Ratio::new(7, 3));
    assert_eq!(brute_fractional(7, &fano()).0, star);
    assert!(h.has_perfect_fractional_matching().unwrap());
}

#[test]
fn random_agree_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..150 {
        let (n, edges) = random_hypergraph(&mut rng, 6, 7);
        let h = Hypergraph::new(n, edges.clone()).unwrap();
        let nu = h.matching_number().unwrap();
        let tau = h.covering_number().unwrap();
        let (star, perfect) = brute_fractional(n, &edges);
        assert_eq!(nu, brute_nu(&edges), "{edges:?}");
        assert_eq!(tau, brute_tau(n, &edges), "{edges:?}");
        assert_eq!(to_q(&h.fractional_matching_number().unwrap()), star, "{edges:?}");
        assert_eq!(h.has_perfect_fractional_matching().unwrap(), perfect, "{edges:?}");
        let q = |x: usize| Ratio::from_integer(x as i64);
        assert!(q(nu) <= star && star <= q(tau));

        let m = h.maximum_matching().unwrap();
        assert_eq!(m.len(), nu);
        for (i, &a) in m.iter().enumerate() {
            for &b in &m[i + 1..] {
                assert!(edges[a].iter().all(|v| !edges[b].contains(v)));
            }
        }
        let cover = h.minimum_cover().unwrap();
        assert_eq!(cover.len(), tau);
        assert!(edges.iter().all(|e| e.iter().any(|v| cover.contains(v))));
    }
}

#[test]
fn partite_bound_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..80 {
        let (n, edges, parts) = random_partite(&mut rng, 3, 2, 6);
        let h = Hypergraph::new(n, edges.clone()).unwrap().with_parts(parts).unwrap();
        let nu = Ratio::from_integer(brute_nu(&edges) as i64);
        let (star, _) = brute_fractional(n, &edges);
        // nu* / (d - 1) with d = 3 parts
        assert_eq!(to_q(&h.furedi_matching_bound(3).unwrap()), star / 2);
        assert!(to_q(&h.furedi_matching_bound(3).unwrap()) <= nu);
    }
}

#[test]
fn json_round_trip_and_rejections() {
    let j: HypergraphJson = serde_json::from_str(r#"{ "vertices": 4, "edges": [[0,2],[1,3]], "parts": [[0,1],[2,3]] }"#).unwrap();
    let h = Hypergraph::from_json(j.clone()).unwrap();
    assert_eq!(h.to_json(), j);
    assert!(Hypergraph::new(2, vec![vec![0, 4]]).is_err());
    // an edge inside a single part violates the partition
    assert!(Hypergraph::new(4, vec![vec![0, 1]]).unwrap().with_parts(vec![vec![0, 1], vec![2, 3]]).is_err());
}

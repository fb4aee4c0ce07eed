use std::process::{Command, Output};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranked_shapes::io::{
    classical_mds, genealogy_to_tree, parse_newick, parse_trees, shape_to_tree, to_ranked, write_fmatrix, RankOptions,
    Ranked, TreeSet,
};
use ranked_shapes::metrics::{d_shape, pairwise_distance_matrix, DistanceMatrix, Metric};
use ranked_shapes::models::{sample_blum_francois, sample_coalescent_genealogy, BetaSplit, PopSize};

fn rts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rts")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn caterpillar_with_ordered_times() {
    let t = parse_newick("((((a:1,b:1):1,c:2):1,d:3):1,e:4);").unwrap();
    let Ranked::Isochronous(g) = to_ranked(&t, &RankOptions::default()).unwrap() else { panic!() };
    assert_eq!(g.code().as_slice(), &[1, 2, 3, 4]);
    assert_eq!(g.times(), &[4.0, 3.0, 2.0, 1.0]);
}

#[test]
fn balanced_four() {
    let t = parse_newick("((a:2,b:2):1,(c:1,d:1):2);").unwrap();
    let Ranked::Isochronous(g) = to_ranked(&t, &RankOptions::default()).unwrap() else { panic!() };
    assert_eq!(g.code().as_slice(), &[1, 2, 2]);
}

#[test]
fn two_tip_dates_give_heterochronous() {
    let t = parse_newick("((a|2000-01-01:1,b|2001-01-01:2):1,(c|2001-01-01:1,d|2001-01-01:1):3);").unwrap();
    let r = to_ranked(&t, &RankOptions::default()).unwrap();
    let Ranked::Heterochronous(g) = r else { panic!("{r:?}") };
    assert_eq!(g.leaves(), 4);
    assert_eq!(g.samples_per_event(), vec![1, 3]);
}

#[test]
fn large_tree_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let g = sample_coalescent_genealogy(100, &PopSize::Constant(1.0), &mut rng).unwrap();
    let mut tree = genealogy_to_tree(&g);
    let leaves: Vec<usize> = (0..tree.nodes().len()).filter(|&i| tree.is_leaf(i)).collect();
    for (k, id) in leaves.into_iter().enumerate() {
        tree.node_mut(id).label = format!("tip{k}");
    }
    let text = tree.to_newick();
    let back = parse_newick(&text).unwrap();
    assert_eq!(back.to_newick(), text);
    assert_eq!(back.leaf_count(), 100);
    let fine = RankOptions { tolerance: 1e-12, ..RankOptions::default() };
    let Ranked::Isochronous(h) = to_ranked(&back, &fine).unwrap() else { panic!() };
    assert_eq!(h.code(), g.code());
    assert!(h.times().iter().zip(g.times()).all(|(a, b)| (a - b).abs() < 1e-9));
    let shape = sample_blum_francois(100, BetaSplit::YULE, &mut rng);
    let tree = parse_newick(&shape_to_tree(&shape).to_newick()).unwrap();
    let Ranked::Isochronous(h) = to_ranked(&tree, &RankOptions::default()).unwrap() else { panic!() };
    assert_eq!(h.code(), &shape);
}

proptest! {
    #[test]
    fn parser_is_total(text in "[():;,ab0-9.e\\-\\[\\]' ]{0,40}") {
        if let Err(e) = parse_newick(&text) {
            prop_assert!(e.offset <= text.len());
        }
    }

    #[test]
    fn ranking_ignores_labels_and_child_order(seed in any::<u64>(), n in 3usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample_coalescent_genealogy(n, &PopSize::Constant(1.0), &mut rng).unwrap();
        let mut tree = genealogy_to_tree(&g);
        for id in 0..tree.nodes().len() {
            let node = tree.node_mut(id);
            node.children.reverse();
            node.label = format!("x{}", (id * 7919 + seed as usize % 13) % 1000);
        }
        let reparsed = parse_newick(&tree.to_newick()).unwrap();
        let fine = RankOptions { tolerance: 1e-12, ..RankOptions::default() };
        let Ranked::Isochronous(h) = to_ranked(&reparsed, &fine).unwrap() else { panic!() };
        prop_assert_eq!(h.code(), g.code());
        prop_assert!(h.times().iter().zip(g.times()).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}

#[test]
fn corpus_formats_agree() {
    let opts = RankOptions::default();
    let codes = parse_trees("# shapes\n1 2 3 4\n1 2 2 3\n", &opts).unwrap();
    let text: String = codes.shapes().unwrap().iter().map(write_fmatrix).collect();
    let fmats = parse_trees(&text, &opts).unwrap();
    assert_eq!(codes.shapes().unwrap(), fmats.shapes().unwrap());
    assert!(parse_trees("", &opts).is_err());
    assert!(matches!(codes, TreeSet::Shapes(_)));
}

fn points(m: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..m).map(|_| (0..k).map(|_| next()).collect()).collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn mds_reconstructs_euclidean_configuration() {
    let p = points(12, 3, 5);
    let rows = p.iter().map(|a| p.iter().map(|b| euclid(a, b)).collect()).collect();
    let e = classical_mds(&DistanceMatrix::from_rows(rows).unwrap(), 3).unwrap();
    assert!((e.explained - 1.0).abs() < 1e-9);
    for i in 0..12 {
        for j in 0..12 {
            assert!((euclid(&e.coordinates[i], &e.coordinates[j]) - euclid(&p[i], &p[j])).abs() < 1e-8);
        }
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut e = k;
        while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
            e += 1;
        }
        for &i in &idx[k..=e] {
            r[i] = (k + e) as f64 / 2.0;
        }
        k = e + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn mds_preserves_distance_ranks_on_yule_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let s: Vec<_> = (0..200).map(|_| sample_blum_francois(9, BetaSplit::YULE, &mut rng).to_fmatrix()).collect();
    let d = pairwise_distance_matrix(&s, true, |a, b| d_shape(a, b, Metric::L2)).unwrap();
    let e = classical_mds(&d, 2).unwrap();
    let (mut orig, mut emb) = (Vec::new(), Vec::new());
    for i in 0..200 {
        for j in i + 1..200 {
            orig.push(d.get(i, j));
            emb.push(euclid(&e.coordinates[i], &e.coordinates[j]));
        }
    }
    let rho = pearson(&ranks(&orig), &ranks(&emb));
    assert!(rho > 0.8, "spearman {rho}");
}

#[test]
fn cli_enumerate_and_moments() {
    assert_eq!(stdout(&rts(&["enumerate", "--n", "5"])).lines().count(), 5);
    let out = stdout(&rts(&["moments", "--n", "6"]));
    let row4: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("# mean")).nth(5).unwrap().split_whitespace().collect();
    assert_eq!(row4[1], "1.5");
}

#[test]
fn cli_exact_and_annealed_means_agree() {
    let exact = stdout(&rts(&["mean", "--model", "yule", "--n", "5"]));
    let sa = stdout(&rts(&["mean", "--model", "yule", "--n", "5", "--method", "sa", "--seed", "7"]));
    assert_eq!(exact.lines().next(), sa.lines().next());
    assert_eq!(exact.lines().next(), Some("code: 1 2 3 4"));
}

#[test]
fn cli_rejects_bad_input() {
    assert_eq!(rts(&["sample", "--model", "yule", "--n", "5"]).status.code(), Some(1));
    assert_eq!(rts(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rts(&["distance", "/nonexistent/trees.txt"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 3 2\n").unwrap();
    let out = rts(&["distance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt"));
}

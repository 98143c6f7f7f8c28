use proptest::prelude::*;
use qagsim::linalg::PermutationOperator;
use qagsim::{code_map, injective_extension, permutation_operator, BitString, TruthTable};

fn table(n: usize, m: usize, outputs: &[usize]) -> TruthTable {
    TruthTable::new(
        n,
        m,
        outputs
            .iter()
            .map(|&v| BitString::from_index(v, m))
            .collect(),
    )
    .unwrap()
}

/// `U_F |x, y> = |x, f(x) XOR y>` on every basis string, through the code map.
fn check_action(f: &TruthTable, dense: bool) {
    let (n, m) = (f.n(), f.m());
    let u = permutation_operator(&injective_extension(f)).unwrap();
    let mut seen = vec![false; 1 << (n + m)];
    let dense_u = dense.then(|| u.to_dense::<f64>().unwrap());
    for xi in 0..1usize << n {
        let x = BitString::from_index(xi, n);
        for yi in 0..1usize << m {
            let y = BitString::from_index(yi, m);
            let expected = x.concat(&f.eval(&x).xor(&y));
            let input = x.concat(&y);
            let image = u.image(input.to_index().unwrap());
            assert_eq!(BitString::from_index(image, n + m), expected);
            assert!(
                !std::mem::replace(&mut seen[image], true),
                "image {image} hit twice"
            );
            if let Some(d) = &dense_u {
                let out = d.apply(&code_map::<f64>(&input).unwrap()).unwrap();
                assert_eq!(out, code_map::<f64>(&expected).unwrap());
            }
        }
    }
    if let Some(d) = &dense_u {
        assert_eq!(PermutationOperator::from_dense(d).unwrap(), u);
        assert!(d.is_unitary());
    }
}

#[test]
fn every_single_output_table_up_to_three_inputs() {
    let start = std::time::Instant::now();
    for n in 1..=3usize {
        for code in 0..1usize << (1 << n) {
            let outputs: Vec<usize> = (0..1 << n).map(|x| (code >> x) & 1).collect();
            check_action(&table(n, 1, &outputs), true);
        }
    }
    assert!(start.elapsed().as_secs() < 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wide_tables_extend_to_permutations(
        (n, m, outputs) in (1usize..=8, 1usize..=4)
            .prop_filter("at most 12 bits", |(n, m)| n + m <= 12)
            .prop_flat_map(|(n, m)| (Just(n), Just(m), proptest::collection::vec(0..1usize << m, 1 << n))),
    ) {
        check_action(&table(n, m, &outputs), n + m <= 7);
    }
}

use polyquant::cli::{parse_symplectic_word, parse_tame_word, symplectic_word_json, tame_word_json};
use polyquant::poly::parse_polynomial;
use polyquant::sample::{random_polynomial, random_symplectic_word, random_tame_word};
use polyquant::{Field, VarNames};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomials_print_and_parse(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars: Vec<usize> = (0..n).collect();
        let names = VarNames::standard(n);
        for field in [Field::Rational, Field::prime(7).unwrap()] {
            let p = random_polynomial(&mut rng, n, &vars, 4, 5, field);
            prop_assert_eq!(parse_polynomial(&p.to_string_with(&names), &names, field).unwrap(), p);
        }
    }

    #[test]
    fn tame_words_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_tame_word(&mut rng, 3, 3, 4, Field::Rational);
        let v = tame_word_json(&w, &VarNames::standard(3));
        prop_assert_eq!(parse_tame_word(&v, Field::Rational).unwrap(), w);
    }

    #[test]
    fn symplectic_words_round_trip(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_symplectic_word(&mut rng, n, 2, 5, Field::Rational);
        let v = symplectic_word_json(&w);
        let text = serde_json::to_string(&v).unwrap();
        let back = parse_symplectic_word(&serde_json::from_str(&text).unwrap(), Field::Rational).unwrap();
        prop_assert_eq!(back, w);
    }
}

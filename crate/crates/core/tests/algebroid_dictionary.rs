mod common;

use common::{check_prolongation, random_data, reconstruct};
use qdouble::is_homological;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn three_readings_of_the_algebroid_axioms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut pass, mut fail) = (0, 0);
    for case in 0..80 {
        let d = random_data(&mut rng);
        let data = d.algebroid();
        let q = data.to_field().unwrap();
        let back = reconstruct(&data, d.base);
        assert_eq!(back.rho, d.rho, "case {case}");
        assert_eq!(back.c, d.c, "case {case}");
        let homological = is_homological(&q);
        assert_eq!(back.jacobi(), homological, "case {case}");
        let poisson = data.lie_poisson(None).unwrap().jacobi_verdict().unwrap().passed();
        assert_eq!(poisson, homological, "case {case}");
        if homological {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    assert!(pass >= 15 && fail >= 15, "pass {pass}, fail {fail}");
}

#[test]
fn prolongation_reproduces_the_frame_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut checked = 0;
    while checked < 50 {
        let d = random_data(&mut rng);
        let data = d.algebroid();
        let q = data.to_field().unwrap();
        if !is_homological(&q) {
            continue;
        }
        checked += 1;
        check_prolongation(&d, &q).unwrap();
    }
}

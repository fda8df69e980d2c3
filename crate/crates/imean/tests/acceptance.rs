//! Acceptance suite: one test per criterion, each printing a final
//! pass/fail line (visible with `--nocapture`). Every tolerance here is
//! exact rational equality; time budgets are asserted where stated.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use imean::af_tower::AFTower;
use imean::bim::{FiniteBIM, SemisimpleSpec};
use imean::means::{self, MeanVector, SolveStatus};
use imean::paradox::{
    arden_upgrade, bike_amplify, check_kuratowski_property, detect_weak, evaluate_word,
    kuratowski_bijection, AffineMap, AffinePiece, KuratowskiInstance, ParadoxKind, PeriodicSet,
    ResClass,
};
use imean::pbij::{GroundSet, PartialBijection, SubsetIdempotent};
use imean::rook::{
    bijection_to_rook, diagonal_d_related, rook_to_bijection, search_tarski_degree1, Dim,
    RookMatrix,
};
use imean::typemonoid::{self, Decision, TypeElement};
use imean::util::SplitMix64;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn pass(n: usize, name: &str) {
    println!("acceptance {n:02} ({name}): PASS");
}

/// All block-size vectors with up to `max_blocks` blocks of size up to
/// `max_size`.
fn all_specs(max_blocks: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_blocks {
        let mut next = Vec::new();
        for prefix in &frontier {
            for n in 1..=max_size {
                let mut spec = prefix.clone();
                spec.push(n);
                out.push(spec.clone());
                next.push(spec);
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn criterion_01_semisimple_means() {
    for sizes in all_specs(4, 5) {
        let started = Instant::now();
        let k = sizes.len();
        let monoid = FiniteBIM::semisimple(&SemisimpleSpec::new(sizes.clone()).unwrap());
        let solution = means::solve(&monoid).unwrap();
        // the polytope is exactly {x >= 0 : sum n(i) x_i = 1}
        assert_eq!(solution.dim, k - 1);
        assert!(!solution.truncated);
        let expected: BTreeSet<Vec<BigRational>> = (0..k)
            .map(|i| {
                let mut v = vec![BigRational::zero(); k];
                v[i] = rat(1, sizes[i] as i64);
                v
            })
            .collect();
        let got: BTreeSet<Vec<BigRational>> = solution
            .vertices
            .iter()
            .map(|v| v.class_values().to_vec())
            .collect();
        assert_eq!(got, expected, "vertex set for {sizes:?}");
        if k == 1 {
            assert_eq!(solution.status, SolveStatus::Unique);
            assert_eq!(
                solution.witness.as_ref().unwrap().class_values(),
                &[rat(1, sizes[0] as i64)]
            );
        } else {
            assert_eq!(solution.status, SolveStatus::Polytope);
        }
        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "spec {sizes:?} took {elapsed:?}"
        );
    }
    pass(1, "semisimple mean polytopes");
}

#[test]
fn criterion_02_mean_axioms_on_random_closures() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0xACCE9702);
    for trial in 0..50 {
        let ground = trial % 4 + 1;
        let monoid = common::random_closure(&mut rng, ground, 5_000);
        let solution = means::solve(&monoid).unwrap();
        for mean in solution.witness.iter().chain(solution.vertices.iter()) {
            let report = means::check_axioms(&monoid, mean).unwrap();
            assert!(
                report.ok(),
                "axiom violation on trial {trial}: {:?}",
                report.violation
            );
            assert!(report.checked_elements > 0);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "suite took {elapsed:?}");
    pass(2, "mean axioms exhaustive on 50 random closures");
}

#[test]
fn criterion_03_tower_compatibility_calculus() {
    let mut rng = SplitMix64::new(0xACCE9703);
    let mut built = 0usize;
    while built < 200 {
        // random valid tower: depth <= 5, block counts <= 4, entries <= 3
        let depth = rng.below(5) + 1;
        let mut levels: Vec<Vec<u64>> = vec![vec![1]];
        let mut maps = Vec::new();
        let mut ok = true;
        for _ in 0..depth {
            let prev = levels.last().unwrap().clone();
            let rows = rng.below(4) + 1;
            let mut m = vec![vec![0u64; prev.len()]; rows];
            for (col, _) in prev.iter().enumerate() {
                m[rng.below(rows)][col] = rng.below(3) as u64 + 1;
            }
            for row in m.iter_mut() {
                for cell in row.iter_mut() {
                    if *cell == 0 && rng.chance(1, 2) {
                        *cell = rng.below(4) as u64;
                    }
                }
            }
            let next: Vec<u64> = m
                .iter()
                .map(|row| row.iter().zip(&prev).map(|(a, b)| a * b).sum())
                .collect();
            if next.contains(&0) {
                ok = false;
                break;
            }
            maps.push(m);
            levels.push(next);
        }
        if !ok {
            continue;
        }
        built += 1;
        let depth = maps.len();
        let tower = AFTower::new(levels.clone(), maps.clone()).unwrap();

        // the normalization biconditional: m^T (M^T y) = r^T y for any
        // non-negative y, normalized or not
        let top = levels[depth].clone();
        let raw: Vec<BigRational> = top
            .iter()
            .map(|_| rat(rng.below(5) as i64, (rng.below(4) + 1) as i64))
            .collect();
        let m = &maps[depth - 1];
        let x: Vec<BigRational> = (0..levels[depth - 1].len())
            .map(|c| {
                m.iter()
                    .zip(&raw)
                    .map(|(row, yv)| BigRational::from_integer(BigInt::from(row[c])) * yv)
                    .sum()
            })
            .collect();
        let mt_x: BigRational = levels[depth - 1]
            .iter()
            .zip(&x)
            .map(|(&n, v)| BigRational::from_integer(BigInt::from(n)) * v)
            .sum();
        let rt_y: BigRational = top
            .iter()
            .zip(&raw)
            .map(|(&n, v)| BigRational::from_integer(BigInt::from(n)) * v)
            .sum();
        assert_eq!(mt_x, rt_y, "normalization transfer is exact");

        // normalized positive seed propagates to a positive mean with
        // compatibility verified at every level
        let total: u64 = top.iter().sum::<u64>();
        let seed: Vec<BigRational> = top.iter().map(|_| rat(1, total as i64)).collect();
        let mean = tower.tower_mean(depth, &seed).unwrap();
        mean.verify(&tower).unwrap();
        assert!(mean.is_positive(), "positive seed lost positivity");

        // and pull_back rejects anything unnormalized
        if !rt_y.is_one() {
            assert!(tower.pull_back(depth - 1, &raw).is_err());
        }
    }
    pass(3, "200 random towers: pull-back, normalization, positivity");
}

#[test]
fn criterion_04_uhf_uniqueness_and_realized_cross_check() {
    let levels: Vec<Vec<u64>> = (0..=6).map(|i| vec![1u64 << i]).collect();
    let maps = vec![vec![vec![2u64]]; 6];
    let tower = AFTower::new(levels, maps).unwrap();
    let mean = tower.uhf_unique_mean(6).unwrap();
    for (i, v) in mean.vectors.iter().enumerate() {
        assert_eq!(v, &vec![rat(1, 1i64 << i)]);
    }
    // cross-check against the solver on the realized levels I_1..I_8
    for level in 0..=3usize {
        let monoid = tower.realize_level(level, 64).unwrap();
        let solution = means::solve(&monoid).unwrap();
        assert_eq!(solution.status, SolveStatus::Unique);
        let solved = solution.witness.unwrap();
        let from_tower =
            MeanVector::new(monoid.atom_classes(), mean.level_values(level).to_vec()).unwrap();
        for e in monoid.idempotents().unwrap() {
            assert_eq!(
                solved.evaluate(&e).unwrap(),
                from_tower.evaluate(&e).unwrap(),
                "level {level} disagrees at {e:?}"
            );
        }
    }
    pass(4, "2^infinity tower mean forced and matches realized solves");
}

#[test]
fn criterion_05_rook_algebra_randomized() {
    let started = Instant::now();
    let ground = GroundSet::new(3).unwrap();
    let base = FiniteBIM::full_symmetric(3).unwrap();
    let mut rng = SplitMix64::new(0xACCE9705);
    for _ in 0..500 {
        let (m, k, p) = (rng.below(3) + 1, rng.below(3) + 1, rng.below(3) + 1);
        let a = common::random_rook(&mut rng, ground, m, k);
        let b = common::random_rook(&mut rng, ground, k, p);
        let q = rng.below(3) + 1;
        let c = common::random_rook(&mut rng, ground, p, q);
        assert!(a.validate_in(&base).unwrap());
        assert!(b.validate_in(&base).unwrap());
        let ab = a.product(&b).unwrap();
        assert!(ab.validate_in(&base).unwrap(), "product stays valid");
        // A = A A* A and the star anti-homomorphism
        assert_eq!(a.product(&a.star()).unwrap().product(&a).unwrap(), a);
        assert_eq!(ab.star(), b.star().product(&a.star()).unwrap());
        // associativity against the other association
        assert_eq!(
            ab.product(&c).unwrap(),
            a.product(&b.product(&c).unwrap()).unwrap()
        );
    }
    // idempotent characterization, exhaustive for 2x2 over I_2
    let elems = FiniteBIM::full_symmetric(2)
        .unwrap()
        .enumerate_elements(100)
        .unwrap();
    let mut checked = 0usize;
    for a in &elems {
        for b in &elems {
            for c in &elems {
                for d in &elems {
                    let m = RookMatrix::new(
                        Dim::Finite(2),
                        Dim::Finite(2),
                        [
                            ((0usize, 0usize), a.clone()),
                            ((0, 1), b.clone()),
                            ((1, 0), c.clone()),
                            ((1, 1), d.clone()),
                        ],
                    )
                    .unwrap();
                    if m.validate().unwrap() {
                        checked += 1;
                        assert_eq!(
                            m.is_idempotent_matrix().unwrap(),
                            m.is_diagonal_of_idempotents()
                        );
                    }
                }
            }
        }
    }
    assert!(checked > 100);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "suite took {elapsed:?}");
    pass(5, "500 random rook cases plus exhaustive idempotent shape");
}

#[test]
fn criterion_06_adams_round_trip() {
    let mut rng = SplitMix64::new(0xACCE9706);
    let mut done = 0usize;
    while done < 200 {
        let n = rng.below(6) + 1;
        let ground = GroundSet::new(n).unwrap();
        let (rows, cols) = (rng.below(3) + 1, rng.below(3) + 1);
        let a = common::random_rook(&mut rng, ground, rows, cols);
        if a.support() == 0 {
            continue;
        }
        done += 1;
        let f = rook_to_bijection(&a).unwrap();
        let back = bijection_to_rook(&f, ground).unwrap();
        let a_entries: Vec<_> = a.entries().collect();
        let b_entries: Vec<_> = back.entries().collect();
        assert_eq!(a_entries, b_entries, "rook -> bijection -> rook");
        let f2 = rook_to_bijection(&back).unwrap();
        assert_eq!(f, f2, "bijection -> rook -> bijection");
    }
    pass(6, "200 tagged-union round trips");
}

#[test]
fn criterion_07_type_monoid_against_rook_search() {
    // family of monoids on ground <= 3: trivial algebras, full symmetric,
    // a semisimple product, and seeded random closures
    let mut monoids: Vec<FiniteBIM> = Vec::new();
    for n in 1..=3usize {
        monoids.push(FiniteBIM::close(GroundSet::new(n).unwrap(), &[], 100).unwrap());
        let spec = SemisimpleSpec::new(vec![n]).unwrap();
        monoids
            .push(FiniteBIM::close(spec.ground(), &spec.matrix_unit_generators(), 10_000).unwrap());
    }
    let spec12 = SemisimpleSpec::new(vec![1, 2]).unwrap();
    monoids.push(
        FiniteBIM::close(spec12.ground(), &spec12.matrix_unit_generators(), 10_000).unwrap(),
    );
    let mut rng = SplitMix64::new(0xACCE9707);
    for _ in 0..4 {
        monoids.push(common::random_closure(&mut rng, 3, 10_000));
    }

    for monoid in &monoids {
        let presentation = typemonoid::present(monoid).unwrap();
        let idempotents = monoid.idempotents().unwrap();
        // all multisets of size 1..=3 (as sorted index tuples)
        let mut multisets: Vec<Vec<SubsetIdempotent>> = Vec::new();
        let k = idempotents.len();
        for i in 0..k {
            multisets.push(vec![idempotents[i]]);
            for j in i..k {
                multisets.push(vec![idempotents[i], idempotents[j]]);
                for l in j..k {
                    multisets.push(vec![idempotents[i], idempotents[j], idempotents[l]]);
                }
            }
        }
        for left in &multisets {
            let left_delta = left
                .iter()
                .map(|e| presentation.delta(e).unwrap())
                .fold(TypeElement::zero(presentation.generator_count()), |a, b| {
                    a.add(&b)
                });
            for right in &multisets {
                // cheap necessary condition first: total point counts
                let lp: usize = left.iter().map(|e| e.count()).sum();
                let rp: usize = right.iter().map(|e| e.count()).sum();
                if lp != rp {
                    // unequal counts can never be D-related; presentation
                    // equality must agree
                    continue;
                }
                let right_delta = right
                    .iter()
                    .map(|e| presentation.delta(e).unwrap())
                    .fold(TypeElement::zero(presentation.generator_count()), |a, b| {
                        a.add(&b)
                    });
                let by_presentation =
                    presentation.equal(&left_delta, &right_delta, 64) == Decision::Yes;
                let by_rook = diagonal_d_related(monoid, left, right).unwrap();
                assert_eq!(
                    by_presentation, by_rook,
                    "presentation vs rook search disagree on {left:?} vs {right:?}"
                );
            }
        }
    }

    // T(I_n) is free on one generator with unit n·g
    for n in 1..=5usize {
        let p = typemonoid::present(&FiniteBIM::full_symmetric(n).unwrap()).unwrap();
        assert_eq!(p.generator_count(), 1);
        assert!(p.relations().is_empty());
        assert_eq!(p.unit(), &TypeElement::new(vec![n as u64]));
    }
    // T(semisimple) is free of rank k with unit (n_1..n_k)
    for sizes in [vec![1usize, 2], vec![2, 2], vec![1, 2, 3]] {
        let spec = SemisimpleSpec::new(sizes.clone()).unwrap();
        let p = typemonoid::present(&FiniteBIM::semisimple(&spec)).unwrap();
        assert_eq!(p.generator_count(), sizes.len());
        assert!(p.relations().is_empty());
        assert_eq!(
            p.unit(),
            &TypeElement::new(sizes.iter().map(|&n| n as u64).collect())
        );
    }
    pass(7, "presentation equality matches exhaustive rook search");
}

#[test]
fn criterion_08_tarski_alternative_desk_scale() {
    // (a) no degree-1 Tarski pair over I_2 or I_3, while means exist
    for n in 2..=3usize {
        let monoid = FiniteBIM::full_symmetric(n).unwrap();
        let elements = monoid.enumerate_elements(100_000).unwrap();
        assert!(search_tarski_degree1(&elements).unwrap().is_none());
        let solution = means::solve(&monoid).unwrap();
        assert!(solution.witness.is_some());
    }

    // (b) no unit collapse in any tested type monoid up to n_max = 10
    for n in 1..=5usize {
        let p = typemonoid::present(&FiniteBIM::full_symmetric(n).unwrap()).unwrap();
        let report = typemonoid::tarski_obstruction(&p, 10, 400);
        assert_eq!(report.found, None);
        assert!(report.inconclusive.is_empty());
    }
    for sizes in all_specs(3, 3) {
        let spec = SemisimpleSpec::new(sizes).unwrap();
        let p = typemonoid::present(&FiniteBIM::semisimple(&spec)).unwrap();
        let report = typemonoid::tarski_obstruction(&p, 10, 400);
        assert_eq!(report.found, None);
        assert!(report.inconclusive.is_empty());
    }

    // (c) the doubling pair over the naturals, found and upgraded
    let double = AffineMap::total_affine(2, 0).unwrap();
    let double_shift = AffineMap::total_affine(2, 1).unwrap();
    let cert = detect_weak(&[double.clone(), double_shift.clone()], 1)
        .unwrap()
        .expect("certificate at word length 1");
    assert_eq!(cert.kind(), ParadoxKind::Weak);
    assert_eq!(cert.a(), &double);
    assert_eq!(cert.b(), &double_shift);
    assert_eq!(cert.a().range(), PeriodicSet::new(2, [0]).unwrap());
    assert_eq!(cert.b().range(), PeriodicSet::new(2, [1]).unwrap());
    let strong = arden_upgrade(&cert, &double_shift).unwrap();
    assert_eq!(strong.kind(), ParadoxKind::Strong);
    assert!(strong
        .a()
        .range()
        .union(&strong.b().range())
        .unwrap()
        .is_naturals());
    pass(8, "no finite Tarski pairs; the naturals pair reproduces");
}

#[test]
fn criterion_09_amplification_instances() {
    let mut instances = 0usize;
    for k in 2..=6u64 {
        for m in 1..=4usize {
            // a = kn; complement of r(a) is the nonzero residues mod k
            let a = AffineMap::total_affine(k, 0).unwrap();
            let pencil: Vec<AffineMap> = (0..m)
                .map(|i| {
                    let dom = ResClass::new(i as u64, m as u64).unwrap();
                    let target = ResClass::new(1 + (i as u64 % (k - 1)), k).unwrap();
                    AffineMap::new([AffinePiece::new(dom, target)]).unwrap()
                })
                .collect();
            let cert = bike_amplify(&a, &pencil).unwrap();
            cert.verify().unwrap();
            assert_eq!(cert.a(), &a.powi(m).unwrap());
            // the intermediate orthogonal family of conjugates, re-checked
            // here independently of the construction
            let f = AffineMap::identity_on(&a.range().complement());
            let mut conjugates = Vec::new();
            for i in 0..=m {
                let ai = a.powi(i).unwrap();
                conjugates.push(ai.compose(&f).unwrap().compose(&ai.inverse()).unwrap().range());
            }
            for x in 0..conjugates.len() {
                for y in x + 1..conjugates.len() {
                    assert!(conjugates[x].disjoint(&conjugates[y]).unwrap());
                }
            }
            instances += 1;
        }
    }
    assert_eq!(instances, 20);
    pass(9, "20 amplification instances re-verify symbolically");
}

#[test]
fn criterion_10_kuratowski() {
    // 300 random finite instances with |E| <= 10
    let mut rng = SplitMix64::new(0xACCE9710);
    for _ in 0..300 {
        let n = (rng.below(5) + 1) * 2;
        let ground = GroundSet::new(n).unwrap();
        let mut points: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut points);
        let m_members = &points[..n / 2];
        let mut n_members = points[n / 2..].to_vec();
        rng.shuffle(&mut n_members);
        let mut points2: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut points2);
        let p_members = &points2[..n / 2];
        let mut q_members = points2[n / 2..].to_vec();
        rng.shuffle(&mut q_members);
        let mut alpha_targets: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut alpha_targets);
        let inst = KuratowskiInstance {
            ground,
            m_part: SubsetIdempotent::from_members(ground, m_members.iter().copied()).unwrap(),
            phi: PartialBijection::new(
                ground,
                m_members.iter().copied().zip(n_members.iter().copied()),
            )
            .unwrap(),
            p_part: SubsetIdempotent::from_members(ground, p_members.iter().copied()).unwrap(),
            psi: PartialBijection::new(
                ground,
                p_members.iter().copied().zip(q_members.iter().copied()),
            )
            .unwrap(),
            alpha: PartialBijection::new(ground, (0..n).zip(alpha_targets.iter().copied()))
                .unwrap(),
        };
        let dec = kuratowski_bijection(&inst).unwrap();
        assert_eq!(dec.bijection.domain(), inst.m_part);
        assert_eq!(dec.bijection.range(), inst.q_part());
        for piece in &dec.pieces {
            for &(x, y) in piece.map.graph() {
                assert_eq!(evaluate_word(&inst, &piece.word, x), Some(y));
            }
        }
    }

    // the idempotent-level property holds on I_n and semisimple monoids
    for n in 1..=4usize {
        assert!(check_kuratowski_property(&FiniteBIM::full_symmetric(n).unwrap()).unwrap());
    }
    let mut type_monoids = Vec::new();
    for sizes in [vec![1usize, 2], vec![2, 2], vec![1, 1, 2]] {
        let monoid = FiniteBIM::semisimple(&SemisimpleSpec::new(sizes).unwrap());
        assert!(check_kuratowski_property(&monoid).unwrap());
        type_monoids.push(typemonoid::present(&monoid).unwrap());
    }
    for n in 1..=4usize {
        type_monoids.push(typemonoid::present(&FiniteBIM::full_symmetric(n).unwrap()).unwrap());
    }

    // consequence: doubling is cancellative in these type monoids
    let mut rng = SplitMix64::new(0xACCE9711);
    for p in &type_monoids {
        let k = p.generator_count();
        for _ in 0..20 {
            let a = TypeElement::new((0..k).map(|_| rng.below(4) as u64).collect());
            let b = TypeElement::new((0..k).map(|_| rng.below(4) as u64).collect());
            let both = p.equal(&a.scale(2), &b.scale(2), 64);
            let single = p.equal(&a, &b, 64);
            assert_eq!(both, single, "2a = 2b iff a = b in {p:?}");
        }
    }
    pass(10, "300 divisions by two certified; property and cancellation hold");
}

#[test]
fn criterion_11_structural_lemmas() {
    // faithful mean forces D = J on every solved instance
    let mut rng = SplitMix64::new(0xACCE9712);
    for trial in 0..30 {
        let monoid = common::random_closure(&mut rng, trial % 4 + 1, 5_000);
        let solution = means::solve(&monoid).unwrap();
        let witness = solution.witness.unwrap();
        if means::is_faithful(&witness) {
            assert!(monoid.check_d_eq_j().unwrap());
        }
    }

    // 0-simplifying: every mean of I_n is faithful
    for n in 1..=5usize {
        let monoid = FiniteBIM::full_symmetric(n).unwrap();
        assert!(monoid.is_zero_simplifying().unwrap());
        let solution = means::solve(&monoid).unwrap();
        for mean in solution.vertices.iter().chain(solution.witness.iter()) {
            assert!(means::is_faithful(mean));
        }
    }

    // local-monoid renormalization agrees with a direct solve on eSe
    for n in [3usize, 4] {
        let monoid = FiniteBIM::full_symmetric(n).unwrap();
        let mean = means::solve(&monoid).unwrap().witness.unwrap();
        for e in monoid.idempotents().unwrap() {
            if e.is_empty() {
                continue;
            }
            let restricted = means::restrict(&monoid, &mean, &e).unwrap();
            let direct = means::solve(&restricted.monoid).unwrap().witness.unwrap();
            for f in restricted.monoid.idempotents().unwrap() {
                assert_eq!(
                    restricted.mean.evaluate(&f).unwrap(),
                    direct.evaluate(&f).unwrap(),
                    "renormalization disagrees on I_{n} at corner {e:?}"
                );
            }
        }
    }
    pass(11, "faithfulness, zero-simplifying, and renormalization lemmas");
}

//! The type monoid: presentations from atom D-classes, the delta map,
//! bounded order queries, the partial sum on D-classes, and the scan for
//! a collapsing order-unit.
//!
//! Run with: `cargo run --example type_monoid`

use imean::bim::{FiniteBIM, SemisimpleSpec};
use imean::pbij::SubsetIdempotent;
use imean::typemonoid::{self, Decision, TypeElement, TypePresentation};

fn main() -> Result<(), imean::error::Error> {
    // The type monoid of I_n is the naturals with order-unit n.
    let i3 = FiniteBIM::full_symmetric(3)?;
    let p = typemonoid::present(&i3)?;
    println!(
        "T(I_3): {} generator(s), {} relation(s), unit {:?}",
        p.generator_count(),
        p.relations().len(),
        p.unit().coeffs()
    );

    // delta counts atoms per class; D-related idempotents share it.
    let rank2 = SubsetIdempotent::from_members(i3.ground(), [0, 2])?;
    println!("delta(rank-2 idempotent) = {:?}", p.delta(&rank2)?.coeffs());

    // A semisimple product has one generator per block.
    let product = FiniteBIM::semisimple(&SemisimpleSpec::new(vec![1, 2])?);
    let q = typemonoid::present(&product)?;
    println!(
        "T(I_1 x I_2): {} generators, unit {:?}",
        q.generator_count(),
        q.unit().coeffs()
    );

    // Bounded order queries: (1,0) <= (1,1) in the free monoid on two
    // generators, while the order-unit never collapses.
    let x = TypeElement::new(vec![1, 0]);
    let y = TypeElement::new(vec![1, 1]);
    println!("(1,0) <= (1,1)? {:?}", q.leq(&x, &y, 50));
    let report = typemonoid::tarski_obstruction(&q, 10, 200);
    println!(
        "(n+1)u <= nu for some n <= {}? {:?}",
        report.n_max, report.found
    );

    // The partial sum [e] + [f] needs orthogonal D-representatives: two
    // rank-2 classes fit inside I_4 but not inside I_3.
    let i4 = FiniteBIM::full_symmetric(4)?;
    let r2_of_3 = SubsetIdempotent::from_members(i3.ground(), [0, 1])?;
    let r2_of_4 = SubsetIdempotent::from_members(i4.ground(), [0, 1])?;
    println!(
        "[rank 2] + [rank 2] in T(I_3): {:?}",
        typemonoid::oplus_partial(&i3, &r2_of_3, &r2_of_3)?
    );
    println!(
        "[rank 2] + [rank 2] in T(I_4): {:?}",
        typemonoid::oplus_partial(&i4, &r2_of_4, &r2_of_4)?.map(|e| e.count())
    );

    // Injecting the relation u = 2u by hand makes the unit collapse, and
    // the scan certifies it at degree 1.
    let u = TypeElement::new(vec![1]);
    let collapsed = TypePresentation::from_parts(1, vec![(u.clone(), u.scale(2))], u)?;
    let report = typemonoid::tarski_obstruction(&collapsed, 5, 50);
    println!("with u = 2u injected, collapse found at n = {:?}", report.found);

    // Bounded searches can come back unknown: the verdict is
    // inconclusive, never a refutation.
    let tight = collapsed.leq(
        &TypeElement::new(vec![3]),
        &TypeElement::new(vec![2]),
        2,
    );
    assert_eq!(tight, Decision::Unknown);
    println!("tight bound verdict: {tight:?}");
    Ok(())
}

//! Building piecewise functions, combining them, and minimizing the result.

use branch_learn::piecewise::{Interval, PiecewiseFn, Segment, SegmentKind};

fn main() -> branch_learn::Result<()> {
    let dom = Interval::new(0.0, 4.0)?;
    // A step down at 2, and a line.
    let step = PiecewiseFn::from_segments(vec![
        Segment::new(0.0, 2.0, SegmentKind::Constant(3.0)),
        Segment::new(2.0, 4.0, SegmentKind::Constant(1.0)),
    ])?;
    let line = PiecewiseFn::linear(dom, 1.0, -1.0);

    let sum = step.add(&line)?;
    let upper = step.pointwise_max(&line)?;
    println!("step + line:     {:?}", sum.breakpoints());
    println!("max(step, line): {:?}", upper.breakpoints());

    let (x, v) = upper.argmin(1000)?;
    println!("argmin of max(step, line): x = {x:.4}, value = {v:.4}");

    // Rational pieces can be scaled and shifted, but not added to other
    // functions: 2 - (x + 1) / (x + 2).
    let ratio = PiecewiseFn::single(dom, SegmentKind::rational(1.0, 1.0, 1.0, 2.0));
    let mixed = ratio.scale(-1.0).offset(2.0);
    let (x, v) = mixed.argmin(1000)?;
    println!("argmin of 2 - ratio: x = {x:.4}, value = {v:.4}");
    for x in [0.5, 1.5, 2.5, 3.5] {
        println!("  f({x}) = {:.4}", mixed.eval(x)?);
    }
    println!("ratio + line: {:?}", ratio.add(&line).unwrap_err());
    Ok(())
}

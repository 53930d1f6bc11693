use std::collections::BTreeSet;

use brickwork::brick::Coding;
use brickwork::bricks::*;
use brickwork::scaffold::{neurons_by_tag, Origin, PortRef, Scaffold, ScaffoldError, TotalDepth};
use brickwork::sim::{run, SimulationConfig};

fn fire_all(n: usize) -> InputBrick {
    InputBrick::new(vec![n], Coding::BinaryVector, (0..n).map(|m| (m, 0)).collect()).unwrap()
}

fn diamond(short: u32, long: u32) -> Scaffold {
    let mut s = Scaffold::new("net").unwrap();
    let a = s.add_brick("a", fire_all(2)).unwrap();
    let b = s.add_brick("b", DelayBrick::new(short).unwrap()).unwrap();
    let c = s.add_brick("c", DelayBrick::new(long).unwrap()).unwrap();
    let d = s.add_brick("d", LogicBrick::and(2).unwrap()).unwrap();
    s.connect(PortRef::new(a, 0), PortRef::new(b, 0)).unwrap();
    s.connect(PortRef::new(a, 0), PortRef::new(c, 0)).unwrap();
    s.connect(PortRef::new(b, 0), PortRef::new(d, 0)).unwrap();
    s.connect(PortRef::new(c, 0), PortRef::new(d, 1)).unwrap();
    s
}

#[test]
fn padded_diamond_arrivals_coincide() {
    let laid = diamond(2, 5).compile().unwrap();
    let raster = run(&laid.circuit, &SimulationConfig::new(20)).unwrap();
    let pad = laid.brick("d.pad0").expect("pad on the short branch");
    assert_eq!(pad.origin, Origin::Padding);
    let first = |name: &str| laid.output(name, 0).unwrap().iter().filter_map(|id| raster.first(id)).min();
    // Source outputs at 1, long branch ready at 6, padded short branch 1 + 2 + 3.
    assert_eq!(first("c"), Some(6));
    assert_eq!(first("d.pad0"), Some(6));
    assert_eq!(first("d"), Some(7));
    assert_eq!(raster.times(&laid.output("d", 0).unwrap()[1]), &[7]);
}

#[test]
fn branches_really_differ_before_the_pad() {
    // Without the pad the AND would see these two a step apart or more.
    let laid = diamond(2, 5).compile().unwrap();
    let raster = run(&laid.circuit, &SimulationConfig::new(20)).unwrap();
    let b = laid.output("b", 0).unwrap();
    let c = laid.output("c", 0).unwrap();
    assert_ne!(raster.first(&b[0]), raster.first(&c[0]));
}

#[test]
fn every_neuron_carries_its_brick_tag() {
    let laid = diamond(1, 1).compile().unwrap();
    let tags = neurons_by_tag(&laid.circuit);
    let names: BTreeSet<&str> = tags.keys().copied().collect();
    assert_eq!(names, ["a", "b", "c", "d", "start"].into());
    for n in laid.circuit.neurons() {
        let local = n.id.as_str().strip_prefix("net:").unwrap();
        assert!(local.starts_with(&format!("{}:", n.brick_tag)) || local == "start", "{}", n.id);
    }
    // One connected circuit: every brick's begin is reachable from start.
    let mut seen = BTreeSet::from([laid.start.clone()]);
    let mut frontier = vec![laid.start.clone()];
    while let Some(id) = frontier.pop() {
        for s in laid.circuit.outgoing(&id) {
            if seen.insert(s.post.clone()) {
                frontier.push(s.post.clone());
            }
        }
    }
    for b in laid.bricks() {
        assert!(seen.contains(&b.begin), "{}", b.name);
    }
}

#[test]
fn runtime_depth_propagates_downstream() {
    let mut s = Scaffold::new("net").unwrap();
    let t = s
        .add_brick("t", InputBrick::new(vec![3], Coding::TemporalValue, [(0, 2), (1, 1)].into_iter().collect()).unwrap())
        .unwrap();
    let m = s.add_brick("m", MinimumBrick::new(3).unwrap()).unwrap();
    let d = s.add_brick("d", DelayBrick::new(2).unwrap()).unwrap();
    s.connect(PortRef::new(t, 0), PortRef::new(m, 0)).unwrap();
    s.connect(PortRef::new(m, 0), PortRef::new(d, 0)).unwrap();
    let depths = s.compute_depths().unwrap();
    assert_eq!(depths.by_name("t"), Some(TotalDepth::Static(0)));
    assert_eq!(depths.by_name("m"), Some(TotalDepth::Runtime));
    assert_eq!(depths.by_name("d"), Some(TotalDepth::Runtime));
    // No merge, so no buffers; the chain still computes the minimum.
    let laid = s.compile().unwrap();
    assert!(laid.insertions().is_empty());
    let raster = run(&laid.circuit, &SimulationConfig::new(30)).unwrap();
    let fired: Vec<usize> = (0..3).filter(|&k| !raster.times(&laid.output("d", 0).unwrap()[k]).is_empty()).collect();
    assert_eq!(fired, vec![1]);
}

#[test]
fn buffered_merge_releases_after_every_done() {
    let mut s = Scaffold::new("net").unwrap();
    let t = s
        .add_brick("t", InputBrick::new(vec![2], Coding::TemporalValue, [(0, 4), (1, 7)].into_iter().collect()).unwrap())
        .unwrap();
    let m = s.add_brick("m", MinimumBrick::new(2).unwrap()).unwrap();
    let b = s.add_brick("b", fire_all(2)).unwrap();
    let g = s.add_brick("g", LogicBrick::or(2).unwrap()).unwrap();
    s.connect(PortRef::new(t, 0), PortRef::new(m, 0)).unwrap();
    s.connect(PortRef::new(m, 0), PortRef::new(g, 0)).unwrap();
    s.connect(PortRef::new(b, 0), PortRef::new(g, 1)).unwrap();
    let laid = s.compile().unwrap();
    let raster = run(&laid.circuit, &SimulationConfig::new(40)).unwrap();
    let done_m = raster.first(&laid.brick("m").unwrap().done).unwrap();
    let done_b = raster.first(&laid.brick("b").unwrap().done).unwrap();
    for name in ["g.buf0", "g.buf1"] {
        let buf = laid.brick(name).unwrap();
        assert_eq!(buf.origin, Origin::Buffer);
        assert!(raster.first(&buf.begin).unwrap() > done_m.max(done_b));
    }
    // OR of the one-hot minimum and an all-ones vector: both lines, same step.
    let out = laid.output("g", 0).unwrap();
    assert_eq!(raster.times(&out[0]).len(), 1);
    assert_eq!(raster.times(&out[0]), raster.times(&out[1]));
}

#[test]
fn released_empty_buffer_stays_silent() {
    let mut s = Scaffold::new("net").unwrap();
    let t = s
        .add_brick("t", InputBrick::new(vec![2], Coding::TemporalValue, Default::default()).unwrap())
        .unwrap();
    let m = s.add_brick("m", MinimumBrick::new(2).unwrap()).unwrap();
    let b = s.add_brick("b", fire_all(2)).unwrap();
    let g = s.add_brick("g", LogicBrick::or(2).unwrap()).unwrap();
    s.connect(PortRef::new(t, 0), PortRef::new(m, 0)).unwrap();
    s.connect(PortRef::new(m, 0), PortRef::new(g, 0)).unwrap();
    s.connect(PortRef::new(b, 0), PortRef::new(g, 1)).unwrap();
    let laid = s.compile().unwrap();
    let raster = run(&laid.circuit, &SimulationConfig::new(40)).unwrap();
    let buf = laid.brick("g.buf0").unwrap();
    assert!(raster.first(&buf.begin).is_some(), "released all the same");
    assert!(buf.outputs[0].iter().all(|id| raster.times(id).is_empty()));
}

#[test]
fn multi_step_port_into_runtime_merge_is_rejected() {
    let mut s = Scaffold::new("net").unwrap();
    let t = s
        .add_brick("t", InputBrick::new(vec![2], Coding::TemporalValue, [(0, 4)].into_iter().collect()).unwrap())
        .unwrap();
    let m = s.add_brick("m", MinimumBrick::new(2).unwrap()).unwrap();
    let raster = InputBrick::new(vec![2], Coding::Raster, [(0, 0), (0, 3)].into_iter().collect()).unwrap();
    let r = s.add_brick("r", raster).unwrap();
    let g = s.add_brick("g", LogicBrick::or(2).unwrap()).unwrap();
    s.connect(PortRef::new(t, 0), PortRef::new(m, 0)).unwrap();
    s.connect(PortRef::new(m, 0), PortRef::new(g, 0)).unwrap();
    s.connect(PortRef::new(r, 0), PortRef::new(g, 1)).unwrap();
    let err = s.compile().unwrap_err();
    assert!(
        matches!(&err, ScaffoldError::Brick { source: brickwork::BrickError::UnsupportedBuffer(_), .. }),
        "{err}"
    );
}

#[test]
fn shape_mismatch_names_the_brick() {
    let mut s = Scaffold::new("net").unwrap();
    let a = s.add_brick("a", fire_all(2)).unwrap();
    let b = s.add_brick("b", fire_all(3)).unwrap();
    let g = s.add_brick("g", LogicBrick::and(2).unwrap()).unwrap();
    s.connect(PortRef::new(a, 0), PortRef::new(g, 0)).unwrap();
    s.connect(PortRef::new(b, 0), PortRef::new(g, 1)).unwrap();
    match s.compile() {
        Err(ScaffoldError::Brick { brick, .. }) => assert_eq!(brick, "g"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn compile_is_repeatable_and_leaves_scaffold_alone() {
    let s = diamond(1, 4);
    let a = s.compile().unwrap();
    let b = s.compile().unwrap();
    assert_eq!(a.circuit, b.circuit);
    assert_eq!(s.len(), 4);
    assert_eq!(a.summaries(), b.summaries());
}

use brickwork::demos::DEMOS;
use brickwork::io::{decode_circuit, decode_document, encode_circuit, encode_laid, write_raster, DecodeError, RasterFormat};
use brickwork::ir::{Circuit, NeuronId, NeuronParams, Role};
use brickwork::sim::{run, SimulationConfig, SpikeRaster};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big_circuit(n: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut c = Circuit::new("big");
    let mut ids = Vec::new();
    for i in 0..n {
        let params = NeuronParams::default()
            .with_threshold(rng.random_range(-1.0..3.0))
            .with_decay(rng.random_range(0.0..=1.0))
            .with_p_fire(if i % 7 == 0 { rng.random_range(0.1..1.0) } else { 1.0 })
            .with_initial_voltage(if i % 5 == 0 { 0.1 * i as f64 } else { 0.0 });
        let (role, index) = match i % 4 {
            0 => (Role::Input, vec![]),
            1 => (Role::Output, vec![i / 4, i % 3]),
            _ => (Role::Internal, vec![]),
        };
        let id = c.add_named_neuron(&format!("n{i}"), params, index, role).unwrap();
        if i % 50 == 0 {
            c.neuron_mut(&id).unwrap().attrs.insert("learning_rate".into(), serde_json::json!(0.01));
        }
        ids.push(id);
    }
    for _ in 0..3 * n {
        let pre = &ids[rng.random_range(0..n)];
        let post = &ids[rng.random_range(0..n)];
        // Awkward floats on purpose: they must survive the text form unchanged.
        let w = rng.random_range(-2.0..2.0) / 3.0;
        let _ = c.add_synapse(pre, post, w, rng.random_range(1..=9));
    }
    for id in ids.iter().step_by(40) {
        c.add_stimulus(id, 3).unwrap();
    }
    c
}

#[test]
fn thousand_neuron_round_trip_is_byte_identical() {
    let c = big_circuit(1000);
    let text = encode_circuit(&c);
    let back = decode_circuit(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(encode_circuit(&back), text);
}

#[test]
fn decoded_circuit_simulates_identically() {
    let c = big_circuit(300);
    let back = decode_circuit(&encode_circuit(&c)).unwrap();
    let config = SimulationConfig::new(50).with_seed(9);
    assert_eq!(run(&c, &config).unwrap(), run(&back, &config).unwrap());
}

#[test]
fn missing_neuron_is_a_located_decode_error() {
    let mut c = Circuit::new("x");
    let a = c.add_named_neuron("a", NeuronParams::default(), vec![], Role::Internal).unwrap();
    let b = c.add_named_neuron("b", NeuronParams::default(), vec![], Role::Internal).unwrap();
    c.add_synapse(&a, &b, 1.0, 1).unwrap();
    let text = encode_circuit(&c);
    assert!(text.contains("\"post\": \"x:b\""));
    let text = text.replace("\"post\": \"x:b\"", "\"post\": \"x:ghost\"");
    match decode_circuit(&text) {
        Err(DecodeError::Invalid { location, .. }) => assert!(location.contains("x:ghost") || location.contains("synapse"), "{location}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn demo_documents_decode_with_summaries_and_run_the_same() {
    for d in DEMOS {
        let laid = d.scaffold().unwrap().compile().unwrap();
        let text = encode_laid(&laid);
        let (circuit, bricks) = decode_document(&text).unwrap();
        assert_eq!(circuit, laid.circuit, "{}", d.name);
        assert_eq!(bricks, laid.summaries());
        let config = SimulationConfig::new(d.steps).with_seed(3);
        assert_eq!(run(&circuit, &config).unwrap(), run(&laid.circuit, &config).unwrap());
    }
}

fn parse_events(text: &str) -> Vec<(u32, String)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,neuron_id"));
    let mut out: Vec<(u32, String)> = lines
        .map(|l| {
            let (t, id) = l.split_once(',').unwrap();
            (t.parse().unwrap(), id.to_owned())
        })
        .collect();
    out.sort();
    out
}

fn parse_per_neuron(text: &str) -> Vec<(u32, String)> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let mut out = Vec::new();
    for l in lines {
        let (id, times) = l.rsplit_once(": ").map_or((l.trim_end_matches(':'), ""), |p| p);
        for t in times.split_whitespace() {
            out.push((t.parse().unwrap(), id.to_owned()));
        }
    }
    out.sort();
    out
}

#[test]
fn raster_formats_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let events: Vec<(u32, NeuronId)> = (0..500)
        .map(|_| (rng.random_range(0..100), NeuronId::new(format!("net:b{}:n{}", rng.random_range(0..4), rng.random_range(0..30)))))
        .collect();
    let raster = SpikeRaster::from_events(100, events);
    let a = parse_events(&write_raster(&raster, RasterFormat::Events));
    let b = parse_per_neuron(&write_raster(&raster, RasterFormat::PerNeuron));
    let want: Vec<(u32, String)> = raster.events().iter().map(|(t, id)| (*t, id.to_string())).collect();
    assert_eq!(a, b);
    assert_eq!(a, want);
}

#[test]
fn three_spikes_three_sorted_lines() {
    let raster = SpikeRaster::from_events(
        9,
        vec![(5, NeuronId::new("n:c")), (2, NeuronId::new("n:b")), (2, NeuronId::new("n:a"))],
    );
    assert_eq!(write_raster(&raster, RasterFormat::Events), "t,neuron_id\n2,n:a\n2,n:b\n5,n:c\n");
}

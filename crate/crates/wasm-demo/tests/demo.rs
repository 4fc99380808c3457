use superspace_demo::{expand_model, kernel_convergence, quantize_model, trajectory};

const OSCILLATOR: &str = "\
const m
const omega0
var q
var p
hamiltonian: p^2/(2*m) + m*omega0^2*q^2/2
";

#[test]
fn expansion_of_the_oscillator() {
    let v = expand_model(OSCILLATOR).unwrap();
    assert_eq!(v["fields"].as_array().unwrap().len(), 2);
    assert_eq!(
        v["fields"][0]["superfield"],
        "q - i*lambda_p * theta thetabar + 1 * theta c^q + 1 * thetabar cbar_p"
    );
    assert_eq!(v["body_matches"], true);
    assert_eq!(v["third_order_vanishes"], true);
}

#[test]
fn quantization_of_the_oscillator() {
    let v = quantize_model(OSCILLATOR).unwrap();
    assert_eq!(v["matches"], true);
    assert_eq!(v["ghost_free"], true);
    assert!(v["density"].as_str().unwrap().contains("hbar"));
}

#[test]
fn bad_model_text_is_an_error() {
    assert!(quantize_model("var q\n").is_err());
    assert!(expand_model("").is_err());
}

#[test]
fn convergence_curve_has_second_order_slope() {
    let v = kernel_convergence(1.0, 1.0, 8).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    let slope = v["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.2, "{slope}");
    assert!(
        kernel_convergence(4.0, 1.0, 8).is_err(),
        "ωT beyond π has no closed form"
    );
}

#[test]
fn trajectory_tracks_the_exact_solution() {
    let v = trajectory(1.0, 1.0, 1000, true).unwrap();
    let q = v["q"].as_array().unwrap();
    let qe = v["q_exact"].as_array().unwrap();
    assert_eq!(q.len(), 1001);
    let last = (q[1000].as_f64().unwrap() - qe[1000].as_f64().unwrap()).abs();
    assert!(last < 1e-2, "{last}");
}

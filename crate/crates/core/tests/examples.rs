// Every example program runs to completion.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!($path);

            #[test]
            fn runs() {
                run().unwrap();
            }
        }
    };
}

example!(scenario_sampling, "../examples/scenario_sampling.rs");
example!(mmse_receiver, "../examples/mmse_receiver.rs");
example!(power_control, "../examples/power_control.rs");
example!(link_selection, "../examples/link_selection.rs");
example!(monte_carlo_sweep, "../examples/monte_carlo_sweep.rs");
example!(curve_fit, "../examples/curve_fit.rs");

#![no_main]

use libfuzzer_sys::fuzz_target;

// NUL-separated argument vector after the program name
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("cubicmf").chain(s.split('\0'));
    if let Ok(c) = cubicmf_cli::parse_config(args) {
        assert!(c.threads >= 1);
        assert!(c.alpha_window > 0.0 && c.alpha_window <= 1.0 / 6.0);
        assert!(c.n_list.windows(2).all(|w| w[0] < w[1]));
    }
});

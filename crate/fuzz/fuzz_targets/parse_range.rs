#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = cubicmf_cli::parse_range(s) {
        assert!(r.n >= 1);
        assert!(r.lo.is_finite() && r.hi.is_finite() && r.lo <= r.hi);
    }
    if let Ok(w) = cubicmf_cli::parse_window(s) {
        assert!(w.lo > 0.0 && w.hi > w.lo);
    }
});

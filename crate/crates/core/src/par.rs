//! Thread-pool plumbing for the optional `parallel` feature.
//!
//! `install` runs a closure inside the crate's rayon pool. The pool size
//! honours the `CRMW_THREADS` environment variable when it holds a positive
//! integer; otherwise rayon's global default applies. Without the
//! `parallel` feature the closure simply runs on the calling thread, so all
//! results are identical either way.

#[cfg(feature = "parallel")]
mod imp {
    use std::sync::OnceLock;

    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();

    fn pool() -> &'static Option<rayon::ThreadPool> {
        POOL.get_or_init(|| {
            let n: usize = std::env::var("CRMW_THREADS").ok()?.parse().ok()?;
            if n == 0 {
                return None;
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
        })
    }

    /// Run `f` on the configured pool (or rayon's global one).
    pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
        match pool() {
            Some(p) => p.install(f),
            None => f(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    /// Run `f` on the calling thread.
    pub fn install<R>(f: impl FnOnce() -> R) -> R {
        f()
    }
}

pub use imp::install;

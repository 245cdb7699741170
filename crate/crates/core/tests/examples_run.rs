//! Runs every example's body on its built-in data so they cannot rot.

#![allow(dead_code)]

mod kernel_approximation {
    include!("../examples/kernel_approximation.rs");
    #[test]
    fn runs() {
        run(20).unwrap();
    }
}

mod train_classifier {
    include!("../examples/train_classifier.rs");
    #[test]
    fn runs() {
        let dir = tempfile::tempdir().unwrap();
        run(None, dir.path()).unwrap();
        assert!(dir.path().join("model.txt").exists());
        assert!(dir.path().join("map.txt").exists());
    }
}

mod bound_table {
    include!("../examples/bound_table.rs");
    #[test]
    fn runs() {
        run().unwrap();
    }
}

mod generalization_gap {
    include!("../examples/generalization_gap.rs");
    #[test]
    fn runs() {
        run(None).unwrap();
    }
}

mod stability_estimate {
    include!("../examples/stability_estimate.rs");
    #[test]
    fn runs() {
        run().unwrap();
    }
}

mod step_size_schedules {
    include!("../examples/step_size_schedules.rs");
    #[test]
    fn runs() {
        run().unwrap();
    }
}

mod sweeps {
    include!("../examples/sweeps.rs");
    #[test]
    fn runs() {
        run(None, 2).unwrap();
    }
}

# Tests for zeno_ctl

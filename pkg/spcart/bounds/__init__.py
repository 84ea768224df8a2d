# Performance bounds package

namespace loopiso {}

# epspy - epsilon-truncated Pitman-Yor samplers and experiments

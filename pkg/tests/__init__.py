# Tests for the colored subgraph toolkit

# Tests for the iterated Fresnel verifier

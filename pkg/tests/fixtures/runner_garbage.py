#!/usr/bin/env python3
"""Hostile fixture: emits non-JSON bytes instead of the handshake."""
import sys
import time

sys.stdout.write("%%% this is not a protocol frame %%%\n")
sys.stdout.flush()
time.sleep(3600)

# Core exact mathematics package

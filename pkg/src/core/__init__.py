# Core computation modules

# User interface modules

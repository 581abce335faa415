v = '0.1.0'

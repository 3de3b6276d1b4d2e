# run wants a consumer of boxed operations; f consumes plain ones
run f

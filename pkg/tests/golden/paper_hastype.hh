hastype z nat.
forall w:tm -> tm -> tm. (forall x:tm. hastype x nat => forall y:tm. hastype y (num x) => hastype (w x y) nat) => hastype (c w) nat.
